//! Bounding volume hierarchy over the edges of a polyline.

use crate::geom::{
    point_segment_distance, segment_meets_closed_rect, segment_meets_open_rect,
    segment_rect_distance, segment_segment_distance, segments_intersect, Point, Rect,
};
use crate::real::Real;

const LEAF: usize = 4;

#[derive(Clone, Debug)]
struct Node<T> {
    bbox: Rect<T>,
    // Leaves: `start..end` into `order`. Inner nodes: children at `left`, `left + 1`.
    start: usize,
    end: usize,
    left: usize,
}

/// Static BVH over segments `(a_i, b_i)`.
#[derive(Clone, Debug)]
pub struct SegmentBvh<T> {
    segs: Vec<(Point<T>, Point<T>)>,
    order: Vec<usize>,
    nodes: Vec<Node<T>>,
}

impl<T: Real> SegmentBvh<T> {
    pub fn new(segs: Vec<(Point<T>, Point<T>)>) -> Self {
        let mut bvh = SegmentBvh {
            order: (0..segs.len()).collect(),
            segs,
            nodes: Vec::new(),
        };
        if !bvh.segs.is_empty() {
            bvh.nodes.push(Node {
                bbox: Rect::new(Point::origin(), Point::origin()),
                start: 0,
                end: 0,
                left: 0,
            });
            bvh.build(0, 0, bvh.segs.len());
        }
        bvh
    }

    /// Edges of a closed polygon.
    pub fn from_polygon(vs: &[Point<T>]) -> Self {
        let n = vs.len();
        Self::new((0..n).map(|i| (vs[i], vs[(i + 1) % n])).collect())
    }

    pub fn len(&self) -> usize {
        self.segs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn segment(&self, i: usize) -> (Point<T>, Point<T>) {
        self.segs[i]
    }

    pub fn bbox(&self) -> Option<Rect<T>> {
        self.nodes.first().map(|n| n.bbox)
    }

    fn seg_box(&self, i: usize) -> Rect<T> {
        let (a, b) = self.segs[i];
        Rect::bounding([a, b]).unwrap()
    }

    fn build(&mut self, node: usize, start: usize, end: usize) {
        let mut bbox = self.seg_box(self.order[start]);
        for k in start + 1..end {
            bbox = bbox.union(&self.seg_box(self.order[k]));
        }
        self.nodes[node].bbox = bbox;
        if end - start <= LEAF {
            self.nodes[node].start = start;
            self.nodes[node].end = end;
            return;
        }
        let wide = bbox.width() >= bbox.height();
        let key = |s: &(Point<T>, Point<T>)| {
            if wide {
                s.0.x + s.1.x
            } else {
                s.0.y + s.1.y
            }
        };
        let mid = (start + end) / 2;
        let segs = &self.segs;
        self.order[start..end].select_nth_unstable_by(mid - start, |&i, &j| {
            key(&segs[i]).partial_cmp(&key(&segs[j])).unwrap_or(std::cmp::Ordering::Equal)
        });
        let left = self.nodes.len();
        let blank = Node { bbox, start: 0, end: 0, left: 0 };
        self.nodes.push(blank.clone());
        self.nodes.push(blank);
        self.nodes[node].left = left;
        self.build(left, start, mid);
        self.build(left + 1, mid, end);
    }

    #[inline]
    fn is_leaf(&self, n: usize) -> bool {
        self.nodes[n].end > self.nodes[n].start
    }

    /// Distance from `p` to the nearest segment and that segment's index.
    pub fn nearest(&self, p: Point<T>) -> Option<(T, usize)> {
        self.nearest_by(|r| r.distance_to_point(p), |a, b| point_segment_distance(p, a, b))
    }

    pub fn distance(&self, p: Point<T>) -> T {
        self.nearest(p).map(|x| x.0).unwrap_or(T::infinity())
    }

    /// Distance between a closed rectangle and the nearest segment.
    pub fn rect_distance(&self, r: &Rect<T>) -> T {
        self.nearest_by(|b| b.distance_to_rect(r), |a, b| segment_rect_distance(a, b, r))
            .map(|x| x.0)
            .unwrap_or(T::infinity())
    }

    /// Distance between segment `[a, b]` and the nearest segment.
    pub fn segment_distance(&self, a: Point<T>, b: Point<T>) -> T {
        let sb = Rect::bounding([a, b]).unwrap();
        self.nearest_by(|r| r.distance_to_rect(&sb), |c, d| segment_segment_distance(a, b, c, d))
            .map(|x| x.0)
            .unwrap_or(T::infinity())
    }

    fn nearest_by<B, S>(&self, lower: B, exact: S) -> Option<(T, usize)>
    where
        B: Fn(&Rect<T>) -> T,
        S: Fn(Point<T>, Point<T>) -> T,
    {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (T::infinity(), usize::MAX);
        let mut stack = vec![(lower(&self.nodes[0].bbox), 0usize)];
        while let Some((lb, n)) = stack.pop() {
            if lb >= best.0 {
                continue;
            }
            let node = &self.nodes[n];
            if self.is_leaf(n) {
                for &i in &self.order[node.start..node.end] {
                    let (a, b) = self.segs[i];
                    let d = exact(a, b);
                    if d < best.0 || (d == best.0 && i < best.1) {
                        best = (d, i);
                    }
                }
            } else {
                let l = node.left;
                let dl = lower(&self.nodes[l].bbox);
                let dr = lower(&self.nodes[l + 1].bbox);
                // Push the farther child first so the nearer one is explored first.
                if dl <= dr {
                    stack.push((dr, l + 1));
                    stack.push((dl, l));
                } else {
                    stack.push((dl, l));
                    stack.push((dr, l + 1));
                }
            }
        }
        Some(best)
    }

    /// Visits every segment whose bbox passes `prune`; stops early when `f` returns true.
    pub fn any<P, F>(&self, prune: P, mut f: F) -> bool
    where
        P: Fn(&Rect<T>) -> bool,
        F: FnMut(usize, Point<T>, Point<T>) -> bool,
    {
        if self.nodes.is_empty() {
            return false;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !prune(&node.bbox) {
                continue;
            }
            if self.is_leaf(n) {
                for &i in &self.order[node.start..node.end] {
                    let (a, b) = self.segs[i];
                    if f(i, a, b) {
                        return true;
                    }
                }
            } else {
                stack.push(node.left + 1);
                stack.push(node.left);
            }
        }
        false
    }

    /// Some segment meets the open rectangle.
    pub fn meets_open_rect(&self, r: &Rect<T>) -> bool {
        self.any(|b| b.overlaps_open(r), |_, a, b| segment_meets_open_rect(a, b, r))
    }

    /// Some segment meets the closed rectangle.
    pub fn meets_closed_rect(&self, r: &Rect<T>) -> bool {
        self.any(|b| b.touches(r), |_, a, b| segment_meets_closed_rect(a, b, r))
    }

    /// Indices of segments meeting the closed rectangle.
    pub fn segments_in_rect(&self, r: &Rect<T>) -> Vec<usize> {
        let mut out = Vec::new();
        self.any(
            |b| b.touches(r),
            |i, a, b| {
                if segment_meets_closed_rect(a, b, r) {
                    out.push(i);
                }
                false
            },
        );
        out.sort_unstable();
        out
    }

    /// Some segment meets the closed segment `[a, b]`.
    pub fn meets_segment(&self, a: Point<T>, b: Point<T>) -> bool {
        let sb = Rect::bounding([a, b]).unwrap();
        self.any(|r| r.touches(&sb), |_, c, d| segments_intersect(a, b, c, d))
    }

    /// Indices of segments meeting the closed segment `[a, b]`.
    pub fn segments_meeting(&self, a: Point<T>, b: Point<T>) -> Vec<usize> {
        let sb = Rect::bounding([a, b]).unwrap();
        let mut out = Vec::new();
        self.any(
            |r| r.touches(&sb),
            |i, c, d| {
                if segments_intersect(a, b, c, d) {
                    out.push(i);
                }
                false
            },
        );
        out.sort_unstable();
        out
    }

    /// Number of segments crossed by the ray from `p` towards `+x`
    /// (half-open rule on `y`, so shared vertices count once).
    pub fn ray_crossings(&self, p: Point<T>) -> usize {
        let mut count = 0usize;
        self.any(
            |r| r.max.x >= p.x && r.min.y <= p.y && r.max.y >= p.y,
            |_, a, b| {
                if (a.y > p.y) != (b.y > p.y) {
                    let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                    if x > p.x {
                        count += 1;
                    }
                }
                false
            },
        );
        count
    }
}
