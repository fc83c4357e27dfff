pub mod bounds;
pub mod export;
pub mod gap;
pub mod sweep;
pub mod verify;
