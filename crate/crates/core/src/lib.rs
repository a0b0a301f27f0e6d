//! Finite-site workbench for morphisms of relative sites.
//!
//! Everything here works on finite data: categories with explicit composition
//! tables, topologies stored as full sets of covering sieves, and presheaves
//! of finite sets. Checkers report the first failure in declared order.

pub mod category;
pub mod comma;
pub mod functor;
pub mod indexed;
pub mod oracle;
pub mod relative;
pub mod sitecheck;
pub mod topology;
pub mod verdict;

pub use category::{Arr, CategoryBuilder, CategoryDescription, CategoryError, FinCategory, Obj};
pub use comma::{CommaArrow, CommaCategory, CommaError, CommaObject, CommaShape};
pub use functor::{FinFunctor, FunctorError, FunctorViolation, NatError, NatTransform};
pub use topology::{all_sieves, Axiom, CommaVariant, Sieve, SieveError, Topology, TopologyError};
pub use indexed::{
    check_fibration, check_fibration_morphism, giraud_topology, is_cartesian, FibrationMorphismFailure, IndexedCategory,
    IndexedError, MissingLift, TotalArrow, TotalCategory, TotalObject,
};
pub use verdict::Verdict;
pub use sitecheck::{
    check_comorphism, check_cover_preserving, check_filtering, check_site_morphism, contains_cover, FilteringReport,
    FilteringWitness, SieveWitness, SiteError, SiteMorphismReport, SitePair,
};
pub use oracle::{
    build_phi_tilde, colimit_of_representables, is_local_isomorphism, is_locally_injective, is_locally_surjective,
    is_sheaf, left_kan_presheaf, plus_construction, representable, restrict_along, sheafify, sheafify_morphism,
    FinPresheaf, PresheafError, PresheafMorphism,
};
pub use relative::{
    check_cofinality, check_diagonal_density, check_fiberwise, check_oracle, check_relative_filtered,
    diagonal_category, fiber_functor, global_functor, relative_a_at, relative_verdict, DiscrepancyDetected, RelativeError,
    RelativeFilteredReport, RelativeProblem, RelativeVerdict,
};
