//! Defect operators, band gaps and ring spectra of the interacting walk.

pub mod band;
pub mod defect;
pub mod eigvec;
pub mod ring;

pub use band::{band_gap, band_sample, Arc, BandSample};
pub use defect::{
    check_unitarity_lemma, compute_r, compute_r_converged, defect_coin_for, resolvent_derivative, DefectOperator,
    DefectSynthesis, LemmaReport,
};
pub use eigvec::{eigenvector_from_defect, line_residual, DefectEigenvector};
pub use ring::{
    free_band, relative_torus_apply, relative_torus_matrix, ring_block, ring_spectrum, sublattice_blocks, SpectrumRow,
    SpectrumTable,
};
