//! Decomposability of invariants and the arguments built on it.

pub mod engine;
pub mod evalfield;
pub mod fastpoly;
pub mod lemma;
pub mod nilpotent;
pub mod reduction;

pub use engine::{
    build_pool, decompose, decomposable_basis, express_product, is_decomposable, CaseDesc, Certificate, Confirmation, DecompositionReport, InvariantPool,
    LinearTarget, PoolItem, Product, ProductTerm,
};
pub use lemma::{lemma_instances, verify_lemma_dec, InstanceStatus, LemmaPart, LemmaReport, Schedule};
pub use nilpotent::{ansatz_check, nilpotent_test_matrices, verify_indecomposability_argument, AnsatzCheck, Claim, IndecomposabilityReport, NilpotentTestSuite, F9};
pub use reduction::{verify_generator_reduction, Group, ReductionItem, ReductionReport, ReductionStatus};
