//! Algebraic sectors, their momentum functions, decoupled blocks and the
//! closed-form levels they produce.

pub mod block;
pub mod closed_form;
pub mod levels;
pub mod qmf;
pub mod sector;
pub mod wavefunction;

pub use block::{block_matrix, sub_diagonal};
pub use closed_form::closed_form_energies;
pub use levels::{algebraic_levels, all_levels, anti_isospectral_pair, levels_at_condition, AlgebraicLevel};
pub use qmf::{qmf_eval, riccati_residual, RationalQmf};
pub use sector::{qs_condition, qs_eta, qs_table, satisfies_qs, Branch, QsCondition, Sector};
pub use wavefunction::{seed_wavefunction, Wavefunction};
