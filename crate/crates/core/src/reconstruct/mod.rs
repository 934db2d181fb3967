//! Reconstruction of the equivariant torus from its Hopf differential.

mod energy;
mod export;
mod mesh;
mod profile;

pub use energy::{willmore_energy, WillmoreEnergy, KAPPA_FIX};
pub use export::{curve_csv, mesh_obj, stereographic_pole, ObjHeader};
pub use mesh::{build_torus_mesh, TorusMesh};
pub use profile::{
    convergents, init_profile, integrate_profile, profile_monodromy, Branch, Monodromy, ProfileCurve,
};
