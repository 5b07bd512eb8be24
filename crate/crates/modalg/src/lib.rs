//! Finitely presented modules over (Z/m)[G]: Hom modules, duals, exterior
//! powers, exterior biduals and the maps between them.

mod ambient;
mod bidual;
mod exterior;
mod hom;
mod invariants;
mod module;

pub use ambient::{annihilator, left_kernel, pair, prune_generators, AmbientBidual};
pub use bidual::{bidual, bidual_contract, bidual_inclusion, bidual_restrict, Bidual, Restriction};
pub use exterior::{
    contraction, exterior_power, free, merge_sign, shuffle_sign, subsets, wedge_coords, wedge_dual_apply, wedge_dual_core,
    ExteriorPower, MAX_DEGREE,
};
pub use hom::{dual, hom_module, HomModule};
pub use invariants::{invariant_submodule, invariants_identify, InvariantSubmodule, InvariantsIso};
pub use module::{direct_sum, quotient, submodule, Elem, FPModule, ModuleHom, PreimageSolver};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModAlgError {
    #[error("map does not respect the relations of its source")]
    NotWellDefined,
    #[error("exterior degree {0} exceeds the supported bound")]
    DegreeTooLarge(usize),
    #[error("degree mismatch: {r} > {s}")]
    DegreeMismatch { r: usize, s: usize },
    #[error("dual restriction is not surjective")]
    NonSurjectiveDual,
    #[error("map is not injective")]
    NotInjective,
    #[error("no preimage")]
    NoPreimage,
}
