pub mod ct;
pub mod graphmap;
pub mod invariants;
pub mod iterset;
pub mod report;
pub mod stallings;
pub mod staples;
pub mod verify;
pub mod words;
