//! Perfect covers of a target set via K4 gadgets: every non-target vertex
//! touching the target becomes a four-vertex gadget and the gadgets of a
//! component are chained through one shared face.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;

use super::{compute_faces, count_matchings_planar, outer_faces, to_integer_count, EdgeWeights, PlanarEmbedding};
use crate::error::{Error, Result};
use crate::graphkit::{UndirectedGraph, VertexLabel};

/// Gadget slots: terminal, next-chain end, previous-chain end, centre.
const TERMINAL: u8 = 0;
const NEXT: u8 = 1;
const PREV: u8 = 2;
const CENTRE: u8 = 3;

#[derive(Clone, Debug)]
pub struct CoverGadget {
    pub embedding: PlanarEmbedding,
    pub weights: EdgeWeights,
    /// gadget-graph vertex of each target vertex, in target order
    pub target_vertices: Vec<usize>,
    /// host vertices that received a gadget, in chain order per component
    pub sites: Vec<usize>,
    pub aux_count: usize,
}

struct Builder {
    graph: UndirectedGraph,
    ends: Vec<(usize, usize)>,
    rotation: Vec<Vec<usize>>,
}

impl Builder {
    fn vertex(&mut self, label: VertexLabel) -> usize {
        self.rotation.push(Vec::new());
        self.graph.add_vertex(label)
    }

    fn edge(&mut self, a: usize, b: usize, mult: u32) -> usize {
        self.ends.push((a, b));
        self.graph.add_edge(a, b, mult, None)
    }

    fn dart(&self, e: usize, from: usize) -> usize {
        if self.ends[e].0 == from {
            2 * e
        } else {
            2 * e + 1
        }
    }
}

pub fn build_cover_gadget(emb: &PlanarEmbedding, target: &[usize]) -> Result<CoverGadget> {
    let n = emb.vertex_count();
    let mut in_target = vec![false; n];
    for &t in target {
        if t >= n {
            return Err(Error::Domain(format!("target vertex {t} out of range")));
        }
        in_target[t] = true;
    }
    let kept: Vec<usize> = (0..emb.edge_count())
        .filter(|&e| {
            let (a, b) = emb.ends(e);
            in_target[a] || in_target[b]
        })
        .collect();
    let mut is_site = vec![false; n];
    for &e in &kept {
        let (a, b) = emb.ends(e);
        for v in [a, b] {
            if !in_target[v] {
                is_site[v] = true;
            }
        }
    }

    // the restricted embedding H on target ∪ sites
    let verts: Vec<usize> = (0..n).filter(|&v| in_target[v] || is_site[v]).collect();
    let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut h_of = vec![usize::MAX; emb.edge_count()];
    for (k, &e) in kept.iter().enumerate() {
        h_of[e] = k;
    }
    let mut builder = Builder { graph: UndirectedGraph::default(), ends: Vec::new(), rotation: Vec::new() };
    for &v in &verts {
        let label = if in_target[v] {
            emb.host().labels[v].clone()
        } else {
            VertexLabel::Gadget { site: v, slot: TERMINAL }
        };
        builder.vertex(label);
    }
    for &e in &kept {
        let (a, b) = emb.ends(e);
        let mult = emb.records(e).iter().map(|&r| emb.host().edges[r].mult).sum();
        builder.edge(local[&a], local[&b], mult);
    }
    let map_dart = |d: usize| 2 * h_of[d / 2] + d % 2;
    for (i, &v) in verts.iter().enumerate() {
        builder.rotation[i] = emb
            .rotation(v)
            .iter()
            .filter(|&&d| h_of[d / 2] != usize::MAX)
            .map(|&d| map_dart(d))
            .collect();
    }
    let h = PlanarEmbedding {
        host: builder.graph.clone(),
        ends: builder.ends.clone(),
        records: (0..kept.len()).map(|k| vec![k]).collect(),
        rotation: builder.rotation.clone(),
        positions: emb.positions().map(|p| verts.iter().map(|&v| p[v]).collect()),
        outer_hint: Vec::new(),
    };
    let faces = compute_faces(&h)?;
    let outer = outer_faces(&h, &faces);
    let comp = h.components();
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);

    let mut weights = EdgeWeights::unit();
    let third = BigRational::new(1.into(), 3.into());
    let mut sites = Vec::new();
    let mut aux_count = 0;
    let mut rot_inserts: BTreeMap<usize, (usize, [usize; 3])> = BTreeMap::new();

    for c in 0..ncomp {
        let members: Vec<usize> = (0..verts.len()).filter(|&i| comp[i] == c).collect();
        let comp_sites: Vec<usize> = members.iter().copied().filter(|&i| !in_target[verts[i]]).collect();
        let targets = members.len() - comp_sites.len();
        if comp_sites.is_empty() {
            continue;
        }
        let holds_all = |f: usize| comp_sites.iter().all(|&s| faces[f].darts.iter().any(|&d| h.tail(d) == s));
        let candidates: Vec<usize> = (0..faces.len())
            .filter(|&f| comp[h.tail(faces[f].darts[0])] == c && holds_all(f))
            .collect();
        let Some(&face) = candidates
            .iter()
            .find(|&&f| outer.get(&c) == Some(&f))
            .or_else(|| candidates.first())
        else {
            return Err(Error::Geometry(
                "the boundary vertices of a component do not share a face".into(),
            ));
        };
        // corner of each site on this face, in walk order
        let walk = &faces[face].darts;
        let mut order: Vec<(usize, usize)> = Vec::new();
        for i in 0..walk.len() {
            let into = walk[i];
            let s = h.head(into);
            if !in_target[verts[s]] && !order.iter().any(|&(t, _)| t == s) {
                order.push((s, into ^ 1));
            }
        }
        let mut prev_next: Option<usize> = None;
        let mut last_next = 0;
        for &(s, corner) in &order {
            let site = verts[s];
            sites.push(site);
            let a = s;
            let b = builder.vertex(VertexLabel::Gadget { site, slot: NEXT });
            let cc = builder.vertex(VertexLabel::Gadget { site, slot: PREV });
            let d = builder.vertex(VertexLabel::Gadget { site, slot: CENTRE });
            let ab = builder.edge(a, b, 1);
            let ac = builder.edge(a, cc, 1);
            let bc = builder.edge(b, cc, 1);
            let ad = builder.edge(a, d, 1);
            let bd = builder.edge(b, d, 1);
            let cd = builder.edge(cc, d, 1);
            for e in [ab, ac, bc] {
                weights.set(e, third.clone());
            }
            rot_inserts.insert(a, (corner, [builder.dart(ac, a), builder.dart(ad, a), builder.dart(ab, a)]));
            let mut rc = Vec::new();
            if let Some(p) = prev_next {
                let link = builder.edge(p, cc, 1);
                let dp = builder.dart(link, p);
                builder.rotation[p].insert(0, dp);
                rc.push(builder.dart(link, cc));
            }
            rc.extend([builder.dart(bc, cc), builder.dart(cd, cc), builder.dart(ac, cc)]);
            builder.rotation[cc] = rc;
            builder.rotation[b] = vec![builder.dart(ab, b), builder.dart(bd, b), builder.dart(bc, b)];
            builder.rotation[d] = vec![builder.dart(ad, d), builder.dart(cd, d), builder.dart(bd, d)];
            prev_next = Some(b);
            last_next = b;
        }
        if targets % 2 == 1 {
            let z = builder.vertex(VertexLabel::Aux(aux_count));
            aux_count += 1;
            let e = builder.edge(last_next, z, 1);
            let dz = builder.dart(e, last_next);
            builder.rotation[last_next].insert(0, dz);
            builder.rotation[z] = vec![builder.dart(e, z)];
        }
    }
    for (a, (corner, darts)) in rot_inserts {
        let r = &mut builder.rotation[a];
        let at = r.iter().position(|&x| x == corner).expect("corner dart") + 1;
        r.splice(at..at, darts);
    }
    let records = (0..builder.ends.len()).map(|k| vec![k]).collect();
    let embedding = PlanarEmbedding::from_rotation(builder.graph, builder.ends, records, builder.rotation, Vec::new())?;
    compute_faces(&embedding).map_err(|e| Error::Internal(format!("gadget graph is not planar: {e}")))?;
    Ok(CoverGadget {
        embedding,
        weights,
        target_vertices: target.iter().map(|t| local[t]).collect(),
        sites,
        aux_count,
    })
}

/// Number of perfect covers of `target` (edge sets covering each target
/// vertex once and every other vertex at most once).
pub fn count_perfect_covers(emb: &PlanarEmbedding, target: &[usize]) -> Result<BigUint> {
    let g = build_cover_gadget(emb, target)?;
    to_integer_count(&count_matchings_planar(&g.embedding, &g.weights)?)
}
