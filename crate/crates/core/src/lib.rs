pub mod ff;
pub mod ghost;
pub mod group;
pub mod harness;
pub mod hom;
pub mod par;
pub mod projective;
pub mod stable;
