//! Singularities at infinity of polynomial maps and intersection homology
//! of filtered complexes.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`]: exact polynomials over Q(i), resultants, gcds.
//! * [`asymptotic`]: singular locus, critical values, the non-properness
//!   (Jelonek) set, fiber counts and witness arcs.
//! * [`infinity`]: leading forms, their generic rank and zero locus, and
//!   tangent directions at infinity.
//! * [`strata`]: perversities, the filtration of the target, and a
//!   numeric Whitney (b) sampler.
//! * [`ih`]: filtered cell complexes and their intersection homology.
//! * [`nf_models`]: combinatorial models of the variety built from the
//!   sheets of a map, and the properness/homology equivalence harness.
//! * [`cli`]: the command-line front end.

pub mod asymptotic;
pub mod cli;
pub mod ih;
pub mod infinity;
pub mod nf_models;
pub mod numeric;
pub mod poly;
pub mod strata;
