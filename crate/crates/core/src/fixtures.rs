//! Reference instances used by tests, the acceptance suite and the CLI docs.

use crate::model::{parse_problem, Notation, ProblemInstance};

/// The 10-message, 10-party instance in `W|B|P` notation.
pub const EXAMPLE_ONE_B_FORM: &str = "\
n=10
1|.|.
2|.|.
3|6|.
4|2,3|.
5|2,3,4|.
6|.|.
7|1,2,6|2,6
8|1,6|.
9|1,6,8|.
10|1,3,6|1,6
";

/// Four parties over four messages, including one eavesdropper (`W|A|P`).
pub const TOY_A_FORM: &str = "n=4; 1|4|2,3 ; 2|3|1,4 ; 3,4|1,2|. ; .|1,4|2,3";

/// Two receivers each holding the other's message (`W|A|P`).
pub const PARITY_A_FORM: &str = "n=2\n1|2|.\n2|1|.\n";

/// Receiver 4 decodes `x4` without side information, which reveals it to
/// parties 2 and 3 (`W|A|P`).
pub const CONFLICT_A_FORM: &str = "n=4\n1|4|2,3\n2|3|1,4\n3|2|1,4\n4|.|2,3\n";

pub fn example_one() -> ProblemInstance {
    parse_problem(EXAMPLE_ONE_B_FORM, Notation::Interfering).expect("fixture parses")
}

pub fn toy() -> ProblemInstance {
    parse_problem(TOY_A_FORM, Notation::SideInfo).expect("fixture parses")
}

pub fn parity() -> ProblemInstance {
    parse_problem(PARITY_A_FORM, Notation::SideInfo).expect("fixture parses")
}

pub fn conflict() -> ProblemInstance {
    parse_problem(CONFLICT_A_FORM, Notation::SideInfo).expect("fixture parses")
}
