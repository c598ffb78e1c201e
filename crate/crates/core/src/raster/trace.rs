//! Moore-neighbour boundary tracing of 8-connected components.

use std::collections::VecDeque;

use super::{BinaryMask, Contour};
use crate::geometry::Point2;

/// Clockwise on screen (y down), starting east.
const DIRS: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
const WEST: usize = 4;

fn dir_index(dx: i64, dy: i64) -> usize {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("offset between Moore neighbours is a unit step")
}

/// Outer boundary of every 8-connected foreground component, in raster order
/// of each component's first pixel, together with its pixel count.
pub(crate) fn trace_components(mask: &BinaryMask) -> Vec<(Contour, usize)> {
    let (w, h) = mask.dimensions();
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || seen[y * w + x] {
                continue;
            }
            let size = flood(mask, &mut seen, x, y);
            out.push((trace_from(mask, x as i64, y as i64), size));
        }
    }
    out
}

fn flood(mask: &BinaryMask, seen: &mut [bool], x: usize, y: usize) -> usize {
    let w = mask.width();
    let mut queue = VecDeque::from([(x as i64, y as i64)]);
    seen[y * w + x] = true;
    let mut size = 0;
    while let Some((cx, cy)) = queue.pop_front() {
        size += 1;
        for (dx, dy) in DIRS {
            let (nx, ny) = (cx + dx, cy + dy);
            if mask.get_signed(nx, ny) && !seen[ny as usize * w + nx as usize] {
                seen[ny as usize * w + nx as usize] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    size
}

type State = ((i64, i64), usize);

/// One Moore step: scan clockwise from the backtrack direction and move to the
/// first foreground neighbour. The new backtrack is the neighbour examined
/// just before it.
fn step(mask: &BinaryMask, (p, back): State) -> Option<State> {
    for turn in 1..=8 {
        let d = (back + turn) % 8;
        let q = (p.0 + DIRS[d].0, p.1 + DIRS[d].1);
        if mask.get_signed(q.0, q.1) {
            let prev = (back + turn - 1) % 8;
            let b = (p.0 + DIRS[prev].0, p.1 + DIRS[prev].1);
            return Some((q, dir_index(b.0 - q.0, b.1 - q.1)));
        }
    }
    None
}

fn trace_from(mask: &BinaryMask, sx: i64, sy: i64) -> Contour {
    let start = (sx, sy);
    let to_point = |(x, y): (i64, i64)| Point2::new(x as f64, y as f64);
    let mut points = vec![to_point(start)];
    let mut current: State = (start, WEST);
    let Some(first) = step(mask, current) else {
        return Contour::closed(points);
    };
    // Jacob's criterion: stop once the first move out of the start pixel is
    // about to repeat.
    let limit = 8 * mask.width() * mask.height() + 16;
    for _ in 0..limit {
        let next = step(mask, current).expect("a traced pixel keeps its neighbours");
        if current.0 == start && next == first && points.len() > 1 {
            break;
        }
        points.push(to_point(next.0));
        current = next;
    }
    if points.len() > 1 && points.last() == points.first() {
        points.pop();
    }
    Contour::closed(points)
}

/// Outer boundaries of all foreground components. Holes are ignored.
///
/// Points are pixel centres in a consistent orientation: the shoelace area on
/// raw `(x, y)` coordinates is positive. An empty mask yields no contours.
#[must_use]
pub fn trace_contours(mask: &BinaryMask) -> Vec<Contour> {
    trace_components(mask).into_iter().map(|(c, _)| c).collect()
}

/// Outer boundary of the component with the most pixels (first wins ties).
#[must_use]
pub fn largest_contour(mask: &BinaryMask) -> Option<Contour> {
    trace_components(mask)
        .into_iter()
        .enumerate()
        .max_by(|(ia, (_, a)), (ib, (_, b))| a.cmp(b).then(ib.cmp(ia)))
        .map(|(_, (c, _))| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        BinaryMask::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    fn is_8_adjacent(a: Point2, b: Point2) -> bool {
        let (dx, dy) = ((a.x - b.x).abs(), (a.y - b.y).abs());
        dx <= 1.0 && dy <= 1.0 && (dx, dy) != (0.0, 0.0)
    }

    /// Foreground pixels with a background (or off-raster) 4-neighbour.
    fn brute_border(mask: &BinaryMask) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for y in 0..mask.height() as i64 {
            for x in 0..mask.width() as i64 {
                if mask.get_signed(x, y)
                    && [(1, 0), (-1, 0), (0, 1), (0, -1)]
                        .iter()
                        .any(|(dx, dy)| !mask.get_signed(x + dx, y + dy))
                {
                    out.push((x, y));
                }
            }
        }
        out
    }

    #[test]
    fn square_block_border_in_order() {
        let mask = mask_from(&[".....", ".###.", ".###.", ".###.", "....."]);
        let contours = trace_contours(&mask);
        assert_eq!(contours.len(), 1);
        let c = &contours[0];
        assert_eq!(c.len(), 8);
        let mut traced: Vec<(i64, i64)> = c.points.iter().map(|p| (p.x as i64, p.y as i64)).collect();
        for i in 0..c.len() {
            assert!(is_8_adjacent(c.points[i], c.points[(i + 1) % c.len()]));
        }
        traced.sort_unstable();
        let mut expected = brute_border(&mask);
        expected.sort_unstable();
        assert_eq!(traced, expected);
        assert!(c.signed_area() > 0.0);
    }

    #[test]
    fn single_pixel_contour() {
        let mask = mask_from(&["...", ".#.", "..."]);
        let c = trace_contours(&mask);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].points, vec![Point2::new(1.0, 1.0)]);
    }

    #[test]
    fn two_blocks_two_contours() {
        let mask = mask_from(&["##...", "##...", ".....", "...##", "...##"]);
        let c = trace_contours(&mask);
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| c.len() == 4));
    }

    #[test]
    fn empty_mask_has_no_contours() {
        assert!(trace_contours(&BinaryMask::new(4, 4)).is_empty());
        assert!(largest_contour(&BinaryMask::new(4, 4)).is_none());
    }

    #[test]
    fn thin_line_is_walked_both_ways() {
        let mask = mask_from(&["###"]);
        let c = &trace_contours(&mask)[0];
        let xs: Vec<f64> = c.points.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn holes_are_ignored() {
        let mask = mask_from(&["#####", "#...#", "#...#", "#####"]);
        let c = trace_contours(&mask);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len(), 14);
    }

    #[test]
    fn largest_component_wins() {
        let mask = mask_from(&["#....", ".....", "..###", "..###"]);
        let c = largest_contour(&mask).unwrap();
        assert_eq!(c.len(), 6);
    }
}
