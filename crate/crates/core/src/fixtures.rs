//! Small reference corpora.

use std::path::Path;

use crate::io::parse_plain;
use crate::model::EventSequence;

/// Twelve-timestamp worked example in plain format, events coded A=1 … F=6:
/// D at 1, nothing at 2, {A,D} at 3, {A,B} at 4, and so on.
pub const EXAMPLE_PLAIN: &str = "4\n\n1 4\n1 2\n4\n1 2\n2 3 5\n5\n5\n1 6\n1 4\n6\n";

pub fn example() -> EventSequence {
    parse_plain(EXAMPLE_PLAIN, Path::new("example")).expect("fixture parses")
}
