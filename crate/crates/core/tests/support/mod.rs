#![allow(dead_code)]

pub mod lp_enumeration;
pub mod scalar_har;
