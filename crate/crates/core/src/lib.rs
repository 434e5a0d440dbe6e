#![no_std]
#![doc = include_str!("../README.md")]

extern crate alloc;

pub mod bcengine;
pub mod exactnum;
pub mod flow;
pub mod hypgeom;
pub mod quadratic;
pub mod treespace;
