//! Electronic structure, magneto-optical spectra, spin dynamics and
//! spectroscopy fitting for negatively charged group-IV vacancy centers in
//! diamond.
//!
//! Frequencies are in GHz, fields in tesla, temperatures in kelvin and times
//! in nanoseconds unless a name says otherwise.

pub mod defect;
pub mod dynamics;
pub mod fitting;
pub mod numerics;
pub mod spectra;
pub mod units;
