//! Energy-minimizing Reeb fields on quasi-regular Sasakian 3-manifolds: exact
//! Riemann-Roch verdicts, weighted 3-sphere geometry, global functionals and
//! torus-reduced curl spectra.

pub mod functionals;
pub mod sasaki_geometry;
pub mod seifert_rr;
pub mod spectrum;
