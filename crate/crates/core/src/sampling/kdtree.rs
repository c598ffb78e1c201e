use crate::geometry::Point2;

#[derive(Debug, Clone)]
struct Node {
    index: usize,
    axis: u8,
    left: Option<usize>,
    right: Option<usize>,
}

/// Balanced 2-D tree over a fixed point list, built by median splits on
/// alternating axes. Immutable after construction.
#[derive(Debug, Clone)]
pub struct KdTree2 {
    points: Vec<Point2>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl KdTree2 {
    #[must_use]
    pub fn new(points: &[Point2]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::with_capacity(points.len());
        let root = build(points, &mut order, 0, &mut nodes);
        Self {
            points: points.to_vec(),
            nodes,
            root,
        }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[must_use]
    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// Indices (into the construction list, ascending) of points within
    /// Euclidean distance `r` of `center`, boundary included.
    #[must_use]
    pub fn within_radius(&self, center: Point2, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if r < 0.0 || r.is_nan() {
            return out;
        }
        let r2 = r * r;
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            let p = self.points[node.index];
            if p.distance_squared(center) <= r2 {
                out.push(node.index);
            }
            let diff = if node.axis == 0 {
                center.x - p.x
            } else {
                center.y - p.y
            };
            let (near, far) = if diff < 0.0 {
                (node.left, node.right)
            } else {
                (node.right, node.left)
            };
            if let Some(n) = near {
                stack.push(n);
            }
            if diff.abs() <= r {
                if let Some(f) = far {
                    stack.push(f);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn build(points: &[Point2], order: &mut [usize], depth: usize, nodes: &mut Vec<Node>) -> Option<usize> {
    if order.is_empty() {
        return None;
    }
    let axis = (depth % 2) as u8;
    let key = |i: &usize| if axis == 0 { points[*i].x } else { points[*i].y };
    order.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.cmp(b)));
    let mid = order.len() / 2;
    let index = order[mid];
    let slot = nodes.len();
    nodes.push(Node {
        index,
        axis,
        left: None,
        right: None,
    });
    let (lo, rest) = order.split_at_mut(mid);
    let hi = &mut rest[1..];
    let left = build(points, lo, depth + 1, nodes);
    let right = build(points, hi, depth + 1, nodes);
    nodes[slot].left = left;
    nodes[slot].right = right;
    Some(slot)
}

/// Stored points within distance `r` of `center`, in construction order.
#[must_use]
pub fn kd_radius_query(tree: &KdTree2, center: Point2, r: f64) -> Vec<Point2> {
    tree.within_radius(center, r)
        .into_iter()
        .map(|i| tree.points[i])
        .collect()
}
