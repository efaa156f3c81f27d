use super::{shared, ChainModel, ChainParams};
use crate::error::{invalid, Error, Result};
use crate::fusscat::critical_point_exact;
use crate::graphs::{EndSpec, FcTree, LeveledGraph, Pascalization, Word};
use crate::scalar::{GenFnScalar, Scalar};

/// One step of a tree walk, relative to the current vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Parent,
    Child(u32),
}

/// A nearest-neighbour walk on a (possibly derooted) Fuss-Catalan tree.
pub trait TreeWalk<S>: Send + Sync {
    fn order(&self) -> u32;

    fn derooted(&self) -> bool;

    fn eta(&self) -> &S;

    /// The end the walk converges to, if any.
    fn end(&self) -> Option<&EndSpec>;

    /// Starting vertex: the root, or the derooted root.
    fn start(&self) -> Word {
        let root = Word::root(self.order());
        if self.derooted() {
            root.children().pop().expect("root has a child")
        } else {
            root
        }
    }

    /// Moves out of a vertex at word length `len` with label `label`.
    fn local_moves(&self, len: usize, label: u32, on_end: bool) -> Result<Vec<(Move, S)>>;

    /// Neighbours of `w` with their transition probabilities.
    fn moves(&self, w: &Word) -> Result<Vec<(Word, S)>> {
        let on_end = self.end().is_some_and(|e| e.agreement(w) == w.len());
        Ok(self
            .local_moves(w.len(), w.label(), on_end)?
            .into_iter()
            .map(|(m, p)| match m {
                Move::Parent => (w.parent().expect("parent move"), p),
                Move::Child(l) => (w.push(l).expect("admissible child"), p),
            })
            .collect())
    }

    fn describe(&self) -> String;
}

fn child_labels(s: u32, label: u32) -> impl Iterator<Item = u32> {
    (s + 1 - label..=s).rev()
}

fn check_eta<S: Scalar>(s: u32, eta: &S, allow_zero: bool) -> Result<()> {
    let crit = S::from_rational(&critical_point_exact(s));
    if eta.below_zero() || (crit.clone() - eta.clone()).below_zero() || (!allow_zero && eta.is_zero()) {
        let low = if allow_zero { "[0" } else { "(0" };
        return invalid(format!(
            "eta = {} outside {low}, {}] for s = {s}",
            eta.render(),
            critical_point_exact(s)
        ));
    }
    Ok(())
}

/// Powers `G^l` and `G^-l` for `l = 0..=s`.
#[derive(Debug, Clone)]
struct Powers<S> {
    up: Vec<S>,
    down: Vec<S>,
}

impl<S: Scalar> Powers<S> {
    fn new(g: &S, s: u32) -> Powers<S> {
        let inv = S::one() / g.clone();
        Powers {
            up: (0..=s).map(|l| g.powi(l)).collect(),
            down: (0..=s).map(|l| inv.powi(l)).collect(),
        }
    }
}

/// The walk `S_(t, eta)` converging to the end `t`.
#[derive(Debug, Clone)]
pub struct FibWalk<S> {
    end: EndSpec,
    eta: S,
    g: S,
    derooted: bool,
    pow: Powers<S>,
    /// `forward[j] = p(t_j, t_{j+1})`, indexed by word length.
    forward: Vec<S>,
    /// `back[j] = p(t_j, t_{j-1})`.
    back: Vec<S>,
}

impl<S: GenFnScalar> FibWalk<S> {
    /// Builds the on-end probabilities down to word length `depth`.
    pub fn new(end: EndSpec, eta: S, derooted: bool, depth: usize) -> Result<FibWalk<S>> {
        let s = end.order();
        check_eta(s, &eta, true)?;
        let g = S::gen_fn_value(s, &eta)?;
        let pow = Powers::new(&g, s);
        let base = usize::from(derooted);
        let mut walk = FibWalk {
            end,
            eta,
            g,
            derooted,
            pow,
            forward: vec![S::zero(); base],
            back: vec![S::zero(); base + 1],
        };
        walk.extend(depth.max(base + 1))?;
        Ok(walk)
    }
}

impl<S: Scalar> FibWalk<S> {
    /// Extends the on-end tables to word length `depth`.
    pub fn extend(&mut self, depth: usize) -> Result<()> {
        while self.forward.len() <= depth {
            let j = self.forward.len();
            let t = self.end.vertex(j);
            let next = self.end.label_at(j + 1);
            let mut f = S::one() - self.back[j].clone();
            for l in t.child_labels() {
                if l != next {
                    f = f - self.eta.clone() * self.pow.up[l as usize].clone();
                }
            }
            if f.is_zero() || f.below_zero() || f.to_f64() > 1.0 + 1e-12 {
                return Err(Error::Invariant(format!(
                    "on-end forward probability {} at t_{j} not in (0, 1]",
                    f.render()
                )));
            }
            self.back.push(self.eta.clone() / f.clone());
            self.forward.push(f);
        }
        Ok(())
    }

    pub fn end(&self) -> &EndSpec {
        &self.end
    }

    pub fn g(&self) -> &S {
        &self.g
    }

    /// Deepest word length with tabulated on-end probabilities.
    pub fn depth(&self) -> usize {
        self.forward.len() - 1
    }

    pub fn forward(&self, j: usize) -> &S {
        &self.forward[j]
    }

    pub fn back(&self, j: usize) -> &S {
        &self.back[j]
    }
}

impl<S: Scalar> TreeWalk<S> for FibWalk<S> {
    fn order(&self) -> u32 {
        self.end.order()
    }

    fn derooted(&self) -> bool {
        self.derooted
    }

    fn eta(&self) -> &S {
        &self.eta
    }

    fn end(&self) -> Option<&EndSpec> {
        Some(&self.end)
    }

    fn local_moves(&self, len: usize, label: u32, on_end: bool) -> Result<Vec<(Move, S)>> {
        let s = self.end.order();
        let mut out = Vec::with_capacity(s as usize + 1);
        if on_end {
            if len > self.depth() {
                return invalid(format!("walk tables stop at depth {}", self.depth()));
            }
            if len > usize::from(self.derooted) {
                out.push((Move::Parent, self.back[len].clone()));
            }
            let next = self.end.label_at(len + 1);
            for l in child_labels(s, label) {
                let p = if l == next {
                    self.forward[len].clone()
                } else {
                    self.eta.clone() * self.pow.up[l as usize].clone()
                };
                out.push((Move::Child(l), p));
            }
        } else {
            out.push((Move::Parent, self.pow.down[label as usize].clone()));
            for l in child_labels(s, label) {
                out.push((Move::Child(l), self.eta.clone() * self.pow.up[l as usize].clone()));
            }
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("fib-walk(end={}, eta={})", self.end.describe(), self.eta.render())
    }
}

/// The recurrent walk `S^eta` on the derooted tree.
#[derive(Debug, Clone)]
pub struct AuxWalk<S> {
    s: u32,
    eta: S,
    g: S,
    pow: Powers<S>,
    root_total: S,
}

impl<S: GenFnScalar> AuxWalk<S> {
    pub fn new(s: u32, eta: S) -> Result<AuxWalk<S>> {
        check_eta(s, &eta, false)?;
        let g = S::gen_fn_value(s, &eta)?;
        let pow = Powers::new(&g, s);
        let root = Word::root(s).children().pop().expect("root has a child");
        let root_total = root
            .child_labels()
            .fold(S::zero(), |acc, l| acc + pow.up[l as usize].clone());
        Ok(AuxWalk {
            s,
            eta,
            g,
            pow,
            root_total,
        })
    }
}

impl<S: Scalar> AuxWalk<S> {
    pub fn g(&self) -> &S {
        &self.g
    }
}

impl<S: Scalar> TreeWalk<S> for AuxWalk<S> {
    fn order(&self) -> u32 {
        self.s
    }

    fn derooted(&self) -> bool {
        true
    }

    fn eta(&self) -> &S {
        &self.eta
    }

    fn end(&self) -> Option<&EndSpec> {
        None
    }

    fn local_moves(&self, len: usize, label: u32, _on_end: bool) -> Result<Vec<(Move, S)>> {
        if len <= 1 {
            return Ok(child_labels(self.s, label)
                .map(|l| (Move::Child(l), self.pow.up[l as usize].clone() / self.root_total.clone()))
                .collect());
        }
        let mut out = vec![(Move::Parent, self.pow.down[label as usize].clone())];
        for l in child_labels(self.s, label) {
            out.push((Move::Child(l), self.eta.clone() * self.pow.up[l as usize].clone()));
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("aux-walk(eta={})", self.eta.render())
    }
}

/// Transition table of a tree walk on the pascalized tree, `levels` deep.
pub fn walk_chain<S: Scalar>(walk: &dyn TreeWalk<S>, params: ChainParams, levels: usize) -> Result<ChainModel<S>> {
    let tree = FcTree::new(walk.order(), walk.derooted())?;
    let rule = Pascalization::new(shared(tree))?;
    let graph = LeveledGraph::with_levels(std::sync::Arc::new(rule), levels);
    let mut failure = None;
    let chain = ChainModel::from_fn(graph, params, |_, from, to| {
        let v = tree.word(from);
        match walk.moves(&v) {
            Ok(moves) => moves
                .into_iter()
                .find(|(w, _)| w.key() == to)
                .map(|(_, p)| p)
                .or_else(|| Some(S::zero())),
            Err(e) => {
                failure.get_or_insert(e);
                Some(S::zero())
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => chain,
    }
}

/// `S_(t, eta)` as a chain on the pascalized (derooted) Fuss-Catalan tree.
pub fn fib_walk<S: GenFnScalar>(end: &EndSpec, eta: S, derooted: bool, levels: usize) -> Result<ChainModel<S>> {
    let walk = FibWalk::new(end.clone(), eta.clone(), derooted, levels + 1)?;
    let params = ChainParams::Walk {
        end: end.describe(),
        eta: eta.render(),
        s: end.order(),
        derooted,
    };
    walk_chain(&walk, params, levels)
}

/// `S^eta` on the pascalized derooted Fibonacci tree.
pub fn aux_walk<S: GenFnScalar>(eta: S, levels: usize) -> Result<ChainModel<S>> {
    let walk = AuxWalk::new(2, eta.clone())?;
    let params = ChainParams::Aux {
        eta: eta.render(),
        s: 2,
    };
    walk_chain(&walk, params, levels)
}
