pub mod bounds;
pub mod error;
pub mod lincomb;
pub mod lie;
pub mod linalg;
pub mod numeric;
pub mod octahedral;
pub mod relations;
pub mod words;
