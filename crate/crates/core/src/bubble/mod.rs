//! Bubble test functions: radial profiles, multi-center families, the
//! polynomial-orthogonality correction and the assembled function u.

mod caps;
mod correction;
mod family;
mod profile;

pub use correction::{assemble_u, bubble_moment, correction_solve, default_eta_margin, CorrectedTestFunction, CONDITION_LIMIT};
pub use family::{
    bubble_energy, bubble_energy_with_order, bubble_integral, bubble_integral_with_order, eval_v, BubbleFamily,
    FamilySpec, RADIAL_ORDER, WEIGHT_FLOOR,
};
pub use profile::{phi, BubbleProfile};
