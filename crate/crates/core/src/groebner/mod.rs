//! Buchberger-style Groebner bases for submodules of free modules over the
//! polynomial ring, plus the Laurent bridge: saturation by the product of
//! all variables, elimination, syzygies, colon modules, and intersection.

mod buchberger;
mod modvec;
mod ops;
mod order;

pub use buchberger::{buchberger, normal_form, Groebner, NormalForm};
pub use modvec::ModVec;
pub use ops::{
    all_vars_product, colon_by_element, contract_rows, eliminate_vars, intersect_ideals,
    row_normal_form, saturate_rows, saturate_tracked, saturated_model, syzygies_laurent,
    syzygies_poly, SatModel, Tracked,
};
pub use order::{BaseOrder, ModOrder, PositionRule};
