use crate::geom::Aabb;

#[derive(Debug, Clone)]
struct Node {
    bbox: Aabb,
    /// Children for internal nodes, `None` for leaves.
    children: Option<(u32, u32)>,
    /// Item index for leaves.
    item: u32,
}

/// Static binary bounding-volume hierarchy over a list of boxes.
///
/// Built top-down: items are sorted by centroid along the axis of largest
/// centroid spread and split where the summed surface-area cost is least.
#[derive(Debug, Clone)]
pub struct AabbTree {
    nodes: Vec<Node>,
    len: usize,
}

impl AabbTree {
    /// `None` for an empty item list.
    pub fn build(boxes: &[Aabb]) -> Option<AabbTree> {
        if boxes.is_empty() {
            return None;
        }
        let mut items: Vec<u32> = (0..boxes.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * boxes.len());
        build_rec(boxes, &mut items, &mut nodes);
        Some(AabbTree {
            nodes,
            len: boxes.len(),
        })
    }

    pub fn root_bbox(&self) -> Aabb {
        self.nodes[0].bbox
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Items whose boxes meet `probe` (closed, with slack `tol`), ascending.
    pub fn query(&self, probe: &Aabb, tol: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i as usize];
            if !n.bbox.intersects(probe, tol) {
                continue;
            }
            match n.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => out.push(n.item as usize),
            }
        }
        out.sort_unstable();
        out
    }

    /// Items whose boxes contain `p`.
    pub fn query_point(&self, p: crate::geom::Vec3, tol: f64) -> Vec<usize> {
        let b = Aabb::new(p, p);
        self.query(&b, tol)
    }

    /// Checks the structural invariants: every internal box contains its
    /// children's and every leaf box equals its item's box.
    pub fn check(&self, boxes: &[Aabb]) -> bool {
        let mut leaves = 0;
        for n in &self.nodes {
            match n.children {
                Some((l, r)) => {
                    let (bl, br) = (self.nodes[l as usize].bbox, self.nodes[r as usize].bbox);
                    if !n.bbox.contains_box(&bl, 0.0) || !n.bbox.contains_box(&br, 0.0) {
                        return false;
                    }
                }
                None => {
                    leaves += 1;
                    if n.bbox != boxes[n.item as usize] {
                        return false;
                    }
                }
            }
        }
        leaves == boxes.len()
    }
}

fn build_rec(boxes: &[Aabb], items: &mut [u32], nodes: &mut Vec<Node>) -> u32 {
    let idx = nodes.len() as u32;
    let bbox = items
        .iter()
        .fold(Aabb::empty(), |b, &i| b.union(&boxes[i as usize]));
    if items.len() == 1 {
        nodes.push(Node {
            bbox,
            children: None,
            item: items[0],
        });
        return idx;
    }
    nodes.push(Node {
        bbox,
        children: None,
        item: u32::MAX,
    });

    let centroids = Aabb::from_points(&items.iter().map(|&i| boxes[i as usize].center()).collect::<Vec<_>>());
    let ext = centroids.extent();
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    items.sort_by(|&a, &b| {
        let (ca, cb) = (boxes[a as usize].center()[axis], boxes[b as usize].center()[axis]);
        ca.total_cmp(&cb).then(a.cmp(&b))
    });

    let n = items.len();
    let mut suffix = vec![0.0; n + 1];
    let mut acc = Aabb::empty();
    for k in (0..n).rev() {
        acc = acc.union(&boxes[items[k] as usize]);
        suffix[k] = acc.surface_area();
    }
    let mut best = (f64::INFINITY, n / 2);
    let mut acc = Aabb::empty();
    for k in 1..n {
        acc = acc.union(&boxes[items[k - 1] as usize]);
        let cost = acc.surface_area() * k as f64 + suffix[k] * (n - k) as f64;
        if cost < best.0 {
            best = (cost, k);
        }
    }
    let (left, right) = items.split_at_mut(best.1);
    let l = build_rec(boxes, left, nodes);
    let r = build_rec(boxes, right, nodes);
    nodes[idx as usize].children = Some((l, r));
    idx
}
