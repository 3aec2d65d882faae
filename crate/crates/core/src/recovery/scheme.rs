use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::criteria::Edge;
use crate::error::{Error, Result};
use crate::stack::StackingSequence;

/// Ply-continuity test between a thicker and a thinner stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlendMode {
    /// The thinner stack is an order-preserving subsequence of the thicker.
    General,
    /// The thinner stack is the first `covering` plies of the thicker one
    /// followed by a contiguous suffix of its remaining plies.
    Scheme { covering: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlendCheck {
    pub blended: bool,
    /// Index in the thicker stack of every ply of the thinner one.
    pub witness: Option<Vec<usize>>,
}

pub fn is_blended(parent: &StackingSequence, thinner: &StackingSequence, mode: BlendMode) -> BlendCheck {
    let (p, t) = (parent.angles(), thinner.angles());
    let witness = if t.len() > p.len() {
        None
    } else {
        match mode {
            BlendMode::General => {
                let mut map = Vec::with_capacity(t.len());
                let mut j = 0;
                for &a in t {
                    while j < p.len() && p[j] != a {
                        j += 1;
                    }
                    if j == p.len() {
                        break;
                    }
                    map.push(j);
                    j += 1;
                }
                (map.len() == t.len()).then_some(map)
            }
            BlendMode::Scheme { covering } => {
                let c = covering.min(t.len());
                let tail = t.len() - c;
                let start = p.len() - tail;
                (p[..c] == t[..c] && p[start..] == t[c..]).then(|| (0..c).chain(start..p.len()).collect())
            }
        }
    };
    BlendCheck {
        blended: witness.is_some(),
        witness,
    }
}

/// One laminate of a blending scheme.
///
/// Its stack is the scheme's covering plies followed by a tail made of its
/// own independent plies and then the last `shared` plies of its parent's
/// tail. A panel with no own plies is fully nested in its parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemePanel {
    pub id: String,
    pub plies: usize,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub shared: usize,
}

/// Ply-sharing map of a group of laminates solved together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlendingScheme {
    /// Plies at the start of every stack, shared by all panels.
    pub covering: usize,
    /// Parents always precede their children.
    pub panels: Vec<SchemePanel>,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub parent: Vec<Option<usize>>,
    pub own: Vec<usize>,
    /// Start of each panel's own variables in the orientation vector.
    pub offset: Vec<usize>,
    pub independent: usize,
}

impl BlendingScheme {
    /// A single laminate with no covering plies.
    pub fn single(id: impl Into<String>, plies: usize) -> Self {
        BlendingScheme {
            covering: 0,
            panels: vec![SchemePanel {
                id: id.into(),
                plies,
                parent: None,
                shared: 0,
            }],
        }
    }

    pub(crate) fn layout(&self) -> Result<Layout> {
        if self.panels.is_empty() {
            return Err(Error::InvalidScheme("no panels".into()));
        }
        let mut index = HashMap::new();
        let mut layout = Layout {
            parent: Vec::new(),
            own: Vec::new(),
            offset: Vec::new(),
            independent: self.covering,
        };
        for (j, p) in self.panels.iter().enumerate() {
            if p.plies < self.covering.max(1) {
                return Err(Error::InvalidScheme(format!("panel {} has fewer plies than the covering", p.id)));
            }
            let tail = p.plies - self.covering;
            let parent = match &p.parent {
                None => {
                    if p.shared != 0 {
                        return Err(Error::InvalidScheme(format!("root panel {} cannot share plies", p.id)));
                    }
                    None
                }
                Some(name) => {
                    let &k: &usize = index
                        .get(name.as_str())
                        .ok_or_else(|| Error::InvalidScheme(format!("parent {name} of {} must be listed before it", p.id)))?;
                    let parent_tail = self.panels[k].plies - self.covering;
                    if p.shared > parent_tail || p.shared > tail {
                        return Err(Error::InvalidScheme(format!("panel {} shares more plies than available", p.id)));
                    }
                    Some(k)
                }
            };
            if index.insert(p.id.as_str(), j).is_some() {
                return Err(Error::InvalidScheme(format!("duplicate panel id {}", p.id)));
            }
            let own = tail - p.shared;
            layout.parent.push(parent);
            layout.own.push(own);
            layout.offset.push(layout.independent);
            layout.independent += own;
        }
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        self.layout().map(|_| ())
    }

    /// Number of orientations needed to build every stack of the scheme.
    pub fn independent_count(&self) -> Result<usize> {
        Ok(self.layout()?.independent)
    }

    pub fn plies(&self) -> Vec<usize> {
        self.panels.iter().map(|p| p.plies).collect()
    }

    /// `(parent, child)` index pairs whose child is fully nested.
    pub fn nested_pairs(&self) -> Vec<(usize, usize)> {
        let Ok(layout) = self.layout() else {
            return Vec::new();
        };
        (0..self.panels.len())
            .filter_map(|j| layout.parent[j].filter(|_| layout.own[j] == 0).map(|p| (p, j)))
            .collect()
    }

    /// Scheme reproducing a given family of stacks: the first `covering`
    /// plies must agree across all stacks; tails are inserted longest first
    /// and each one hangs from the earlier tail sharing its longest suffix.
    pub fn infer(stacks: &[(String, StackingSequence)], covering: usize) -> Result<Self> {
        let Some((_, first)) = stacks.first() else {
            return Err(Error::InvalidScheme("no stacks".into()));
        };
        if first.plies() < covering {
            return Err(Error::InvalidScheme("stack shorter than the covering".into()));
        }
        let cover = &first.angles()[..covering];
        for (id, s) in stacks {
            if s.plies() < covering.max(1) || &s.angles()[..covering] != cover {
                return Err(Error::InvalidScheme(format!("stack {id} does not start with the common covering")));
            }
        }
        let mut order: Vec<usize> = (0..stacks.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(stacks[i].1.plies()));
        let mut panels: Vec<SchemePanel> = Vec::new();
        let mut placed: Vec<&[i32]> = Vec::new();
        for &i in &order {
            let (id, s) = &stacks[i];
            let tail = &s.angles()[covering..];
            let mut best: Option<(usize, usize)> = None;
            for (k, other) in placed.iter().enumerate() {
                let common = tail.iter().rev().zip(other.iter().rev()).take_while(|(a, b)| a == b).count();
                if common > 0 && best.is_none_or(|(_, c)| common > c) {
                    best = Some((k, common));
                }
            }
            panels.push(SchemePanel {
                id: id.clone(),
                plies: s.plies(),
                parent: best.map(|(k, _)| panels[k].id.clone()),
                shared: best.map_or(0, |(_, c)| c),
            });
            placed.push(tail);
        }
        let scheme = BlendingScheme { covering, panels };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Fully nested scheme built from a panel graph: panels sorted by
    /// decreasing ply count, each hanging from its thickest already placed
    /// neighbour.
    pub fn from_adjacency(ids: &[String], plies: &[usize], edges: &[Edge], covering: usize) -> Result<Self> {
        if ids.len() != plies.len() {
            return Err(Error::DimensionMismatch(format!("{} ids but {} ply counts", ids.len(), plies.len())));
        }
        let mut neighbours = vec![Vec::new(); ids.len()];
        for &(p, q) in edges {
            if p >= ids.len() || q >= ids.len() {
                return Err(Error::DanglingEdge(p.to_string(), q.to_string()));
            }
            neighbours[p].push(q);
            neighbours[q].push(p);
        }
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(plies[i]));
        let mut placed = vec![false; ids.len()];
        let mut panels = Vec::new();
        for &i in &order {
            let parent = neighbours[i]
                .iter()
                .copied()
                .filter(|&k| placed[k])
                .max_by_key(|&k| (plies[k], std::cmp::Reverse(k)));
            panels.push(SchemePanel {
                id: ids[i].clone(),
                plies: plies[i],
                parent: parent.map(|k| ids[k].clone()),
                shared: if parent.is_some() { plies[i].saturating_sub(covering) } else { 0 },
            });
            placed[i] = true;
        }
        let scheme = BlendingScheme { covering, panels };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// Stacks of every scheme panel from the independent orientations, laid out
/// as the covering plies followed by each panel's own plies in scheme order.
pub fn assemble_stacks(orientations: &[i32], scheme: &BlendingScheme) -> Result<Vec<StackingSequence>> {
    let layout = scheme.layout()?;
    if orientations.len() != layout.independent {
        return Err(Error::DimensionMismatch(format!(
            "scheme needs {} orientations, got {}",
            layout.independent,
            orientations.len()
        )));
    }
    let mut tails = Vec::new();
    assemble_tails(orientations, scheme, &layout, &mut tails);
    let cover = &orientations[..scheme.covering];
    tails
        .into_iter()
        .map(|t| StackingSequence::new(cover.iter().chain(t.iter()).copied().collect()))
        .collect()
}

pub(crate) fn assemble_tails(orientations: &[i32], scheme: &BlendingScheme, layout: &Layout, tails: &mut Vec<Vec<i32>>) {
    tails.clear();
    for (j, panel) in scheme.panels.iter().enumerate() {
        let own = &orientations[layout.offset[j]..layout.offset[j] + layout.own[j]];
        let mut tail = own.to_vec();
        if let Some(p) = layout.parent[j] {
            let pt: &Vec<i32> = &tails[p];
            tail.extend_from_slice(&pt[pt.len() - panel.shared..]);
        }
        tails.push(tail);
    }
}
