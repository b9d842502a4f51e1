//! Bimonoid species built from cuts of preorders, exhaustive checks of the
//! intertwining and bimonoid conditions, and the Hopf algebras they produce
//! under the Fock functor.
pub mod avoidance;
pub mod fock;
pub mod instances;
pub mod preorder;
pub mod setn;
pub mod species;
pub mod subset;
pub mod verify;

pub use instances::{build_instance, instance, Params};
pub use preorder::{Cut, Preorder, PreorderError, TotalOrderPair};
pub use setn::{FiniteSet, MapClass, Multimap, SetnError, Square, SquareCheck, SquareWitness};
pub use species::{delta, mu, CutResult, Element, Instance, InstanceRef, Species, SpeciesError, Which};
pub use verify::{check_bimonoid, check_intertwined, check_species_over_preorders, Stage, VerificationReport};
pub use fock::{check_isomorphism_by_change_of_basis, check_isomorphism_by_constants, fock_tables, graded_dual, verify_hopf_axioms, FockOptions, FockTable};
