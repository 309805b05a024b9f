//! Process exit codes. Values from 64 up follow the BSD `sysexits` numbering.

pub const SUCCESS: u8 = 0;
/// `verify` found at least one failing check.
pub const CHECK_FAILED: u8 = 1;
/// A solve stopped on a singular block coefficient.
pub const BREAKDOWN: u8 = 2;
/// A solve hit the iteration cap before every column converged.
pub const MAX_ITER: u8 = 3;
pub const USAGE: u8 = 64;
/// Input file present but malformed.
pub const DATA: u8 = 65;
/// Input file missing or unreadable.
pub const NO_INPUT: u8 = 66;
pub const SOFTWARE: u8 = 70;
pub const IO: u8 = 74;
