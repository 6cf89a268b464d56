//! Finite categories, functors, natural isomorphisms and concrete
//! fragments of finite sets.

mod category;
mod closure;
mod colimit;
mod fragment;
mod functor;
mod pullback;

pub use category::{marker_shape, validate_category, Arrow, Diagram, FinCat, Marker};
pub use closure::{
    coherent_closure, coherent_closure_in, factor_cocone_through_closure, full_finset, Closure, ClosureConfig,
    ClosureRound, FactoredCocone,
};
pub use colimit::{
    chain_colimit, factor_through_stage, is_filtered, sample_limits, set_colimit, verify_colimit_coherent, CatDiagram,
    Colimit,
};
pub use fragment::{
    coequalizes_kernel_pair, compose_fn, concrete_property, finset_limit, image, image_factorization, image_of,
    is_concrete_limit, is_effective_epi, is_injective, is_surjective, kernel_pair, preimage, preimage_is_lattice_hom,
    quotient, validate_fragment, well_shaped, FragmentBuilder, Func, ImageFactorization, SetFragment, SetLimit,
    Subobjects, Subset,
};
pub use functor::{
    enumerate_functors, enumerate_natural_isos, is_isofibration, product, validate_functor, validate_two_cell, Functor,
    TwoCell,
};
pub use pullback::{
    cone_report, map_diagram, pullback_category, pullback_category_unchecked, reflection_failures, ConeReport, Pullback,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FinCatError {
    #[error("malformed input: {0}")]
    Json(String),
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("functor is not an isofibration")]
    NotIsofibration,
    #[error("index category is not filtered")]
    NotFiltered,
    #[error("no factorization through stages up to {0}")]
    StageBound(usize),
    #[error("budget exhausted: {0}")]
    Budget(String),
}
