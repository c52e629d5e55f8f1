#[path = "support/straight_line.rs"]
mod straight_line;

use dalab_core::daext::Mode;
use straight_line::compare;

#[test]
fn structural_matches_straight_line_at_128() {
    compare(128, Mode::Structural, 6);
}

#[test]
fn structural_matches_straight_line_at_256() {
    compare(256, Mode::Structural, 3);
}

#[test]
fn statistical_matches_straight_line_at_64() {
    compare(64, Mode::Statistical, 8);
}
