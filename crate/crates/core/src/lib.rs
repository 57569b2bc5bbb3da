//! Exact surgery formulas for the torsion, Alexander polynomial and Seiberg-Witten
//! function of 3-manifolds obtained by surgery on framed links.

pub mod abgroup;
pub mod diagram;
pub mod error;
pub mod exactnum;
pub mod groupring;
pub mod linkdata;
pub mod surgery;
pub mod sw;

pub use error::{Error, Result};
