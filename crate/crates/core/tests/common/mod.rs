#![allow(dead_code)]

pub mod newreno_table;
pub mod packing;
