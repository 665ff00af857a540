//! Discriminants, chain invariants, barks and boundary types.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{Chain, DualGraph, QDivisor};
use crate::linalg::{
    det_exact, is_negative_definite, smith_normal_form, solve_rational, IntMatrix, Rational, TorsionGroup,
};

/// `d(D) = det(-Q(D))` on the given support; `d(0) = 1`.
pub fn discriminant<S: AsRef<str>>(g: &DualGraph, support: &[S]) -> Result<BigInt> {
    let idx = g.indices_of(support)?;
    Ok(discriminant_idx(g, &idx))
}

pub fn discriminant_graph(g: &DualGraph) -> BigInt {
    let all: Vec<usize> = (0..g.len()).collect();
    discriminant_idx(g, &all)
}

pub(crate) fn discriminant_idx(g: &DualGraph, idx: &[usize]) -> BigInt {
    det_exact(&-&g.intersection_matrix_on(idx)).expect("square")
}

pub fn chain_discriminant(ch: &Chain) -> BigInt {
    det_exact(&-&ch.intersection_matrix()).expect("square")
}

/// `K.C = -2 - C^2` for a smooth rational curve.
pub fn canonical_degree(weight: i64) -> i64 {
    -2 - weight
}

fn require_tree(g: &DualGraph) -> Result<()> {
    if g.is_tree() {
        Ok(())
    } else if !g.is_forest() {
        Err(Error::NotATree("graph contains a cycle".into()))
    } else {
        Err(Error::NotATree("graph is not connected".into()))
    }
}

/// Evaluates `-C^2 prod d(D_i) - sum_i d(D_i - C_i) prod_{j != i} d(D_j)`, where the
/// `D_i` are the branches of `g` at `c` and `C_i` the component of `D_i` meeting `c`.
pub fn det_branch_formula(g: &DualGraph, c: &str) -> Result<BigInt> {
    require_tree(g)?;
    let ci = g.idx(c)?;
    let rest = g.without(c)?;
    let mut branches = Vec::new();
    for comp in rest.components_idx() {
        let ids: Vec<&str> = comp.iter().map(|&i| rest.id(i)).collect();
        let attach = *ids
            .iter()
            .find(|id| g.adjacent(c, id).unwrap_or(false))
            .expect("each branch of a tree meets the removed vertex");
        let d_full = discriminant(g, &ids)?;
        let minus: Vec<&str> = ids.iter().copied().filter(|&x| x != attach).collect();
        branches.push((d_full, discriminant(g, &minus)?));
    }
    let all: BigInt = branches.iter().map(|(d, _)| d).product();
    let mut acc = -BigInt::from(g.weight_at(ci)) * &all;
    for (i, (_, dm)) in branches.iter().enumerate() {
        let others: BigInt =
            branches.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, (d, _))| d).product();
        acc -= dm * others;
    }
    Ok(acc)
}

/// `d(D_1) d(D_2) - d(D_1 - C_1) d(D_2 - C_2)` for a tree split into two connected
/// parts by a single edge `C_1 C_2`.
pub fn det_join_formula<S: AsRef<str>>(g: &DualGraph, d1: &[S], d2: &[S]) -> Result<BigInt> {
    let a: BTreeSet<usize> = g.indices_of(d1)?.into_iter().collect();
    let b: BTreeSet<usize> = g.indices_of(d2)?.into_iter().collect();
    if !a.is_disjoint(&b) || a.len() + b.len() != g.len() {
        return Err(Error::InvalidJoin("parts must partition the vertices".into()));
    }
    if !g.induced_idx(&a).is_connected() || !g.induced_idx(&b).is_connected() {
        return Err(Error::InvalidJoin("parts must be connected".into()));
    }
    let joins: Vec<(usize, usize)> = a
        .iter()
        .flat_map(|&i| g.neighbors_idx(i).iter().filter(|j| b.contains(j)).map(move |&j| (i, j)))
        .collect();
    let [(c1, c2)] = joins.as_slice() else {
        return Err(Error::InvalidJoin(format!("{} joining edges", joins.len())));
    };
    let av: Vec<usize> = a.iter().copied().collect();
    let bv: Vec<usize> = b.iter().copied().collect();
    let a_minus: Vec<usize> = av.iter().copied().filter(|i| i != c1).collect();
    let b_minus: Vec<usize> = bv.iter().copied().filter(|i| i != c2).collect();
    Ok(discriminant_idx(g, &av) * discriminant_idx(g, &bv)
        - discriminant_idx(g, &a_minus) * discriminant_idx(g, &b_minus))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainInvariants {
    pub d: BigInt,
    pub d_prime: BigInt,
    pub e: Rational,
    pub e_tilde: Rational,
    pub delta: Rational,
}

/// `d(R)` and `d'(R) = d(R - R_1)`; defined for any chain.
pub fn chain_d_dprime(ch: &Chain) -> (BigInt, BigInt) {
    (chain_discriminant(ch), chain_discriminant(&ch.drop_first(1)))
}

pub fn chain_invariants(ch: &Chain) -> Result<ChainInvariants> {
    if !ch.is_admissible() {
        return Err(Error::NotAdmissible(format!("chain {ch}")));
    }
    let (d, d_prime) = chain_d_dprime(ch);
    let (_, d_prime_rev) = chain_d_dprime(&ch.reversed());
    Ok(ChainInvariants {
        e: Rational::new(d_prime.clone(), d.clone()),
        e_tilde: Rational::new(d_prime_rev, d.clone()),
        delta: Rational::new(BigInt::one(), d.clone()),
        d,
        d_prime,
    })
}

/// Maximal twigs of a non-chain tree, all of which must be admissible.
pub fn admissible_twigs(g: &DualGraph) -> Result<Vec<Chain>> {
    let twigs = g.maximal_twigs()?;
    if let Some(bad) = twigs.iter().find(|t| !t.is_admissible()) {
        return Err(Error::NotAdmissible(format!("twig {bad} starting at {}", bad.ids()[0])));
    }
    Ok(twigs)
}

/// `delta(D)`: sum of `1/d(T)` over maximal twigs.
pub fn delta(g: &DualGraph) -> Result<Rational> {
    let mut acc = Rational::zero();
    for t in admissible_twigs(g)? {
        acc += chain_invariants(&t)?.delta;
    }
    Ok(acc)
}

/// `e(D)`: sum of `e(T)` over maximal twigs.
pub fn e_sum(g: &DualGraph) -> Result<Rational> {
    let mut acc = Rational::zero();
    for t in admissible_twigs(g)? {
        acc += chain_invariants(&t)?.e;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BarkKind {
    /// Whole component for admissible chains and forks, maximal twigs otherwise.
    #[default]
    Auto,
    WholeComponent,
    Twigs,
}

/// Resolution graph of a quotient singularity: one branching vertex of degree three,
/// all weights at most -2, negative definite and `delta > 1`.
pub fn is_admissible_fork(g: &DualGraph) -> bool {
    let branching = g.branching_vertices();
    g.is_tree()
        && branching.len() == 1
        && g.degree_idx(branching[0]) == 3
        && g.weights().iter().all(|&w| w <= -2)
        && is_negative_definite(&g.intersection_matrix()).unwrap_or(false)
        && delta(g).is_ok_and(|d| d > Rational::one())
}

fn check_snc_minimal(g: &DualGraph) -> Result<()> {
    for i in 0..g.len() {
        if g.weight_at(i) == -1 && g.degree_idx(i) <= 2 {
            return Err(Error::NotMinimal(g.id(i).to_string()));
        }
    }
    Ok(())
}

fn rat_i(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Solves `Q(S) x = rhs` on the support `S` and adds the result to `out`.
fn solve_onto(g: &DualGraph, support: &[usize], rhs: Vec<Rational>, out: &mut QDivisor) -> Result<()> {
    let q = g.intersection_matrix_on(support).to_rational();
    let x = solve_rational(&q, &rhs)?;
    for (&i, c) in support.iter().zip(&x) {
        out.add(g.id(i), c);
    }
    Ok(())
}

/// `Bk(R, R_1)`: `R_1 . Bk = -1`, `R_i . Bk = 0` otherwise; tip first.
pub fn bark_chain(ch: &Chain) -> Result<Vec<Rational>> {
    if !ch.is_admissible() {
        return Err(Error::NotAdmissible(format!("chain {ch}")));
    }
    let mut rhs = vec![Rational::zero(); ch.len()];
    rhs[0] = rat_i(-1);
    solve_rational(&ch.intersection_matrix().to_rational(), &rhs)
}

/// The bark of a reduced snc forest: the sum of the barks of its components.
pub fn bark(g: &DualGraph, kind: BarkKind) -> Result<QDivisor> {
    if !g.is_forest() {
        return Err(Error::NotATree("graph contains a cycle".into()));
    }
    check_snc_minimal(g)?;
    let mut out = QDivisor::zero();
    for comp in g.components_idx() {
        let sub = g.induced_idx(&comp.iter().copied().collect());
        let admissible_whole = match sub.as_chain() {
            Some(ch) => ch.is_admissible(),
            None => is_admissible_fork(&sub),
        };
        let whole = match kind {
            BarkKind::WholeComponent => true,
            BarkKind::Twigs => false,
            BarkKind::Auto => admissible_whole,
        };
        if whole {
            // (K + D) . D_i = beta_i - 2
            let rhs = (0..sub.len()).map(|i| rat_i(sub.degree_idx(i) as i64 - 2)).collect();
            let support: Vec<usize> = (0..sub.len()).collect();
            solve_onto(&sub, &support, rhs, &mut out)?;
        } else if sub.as_chain().is_none() {
            for twig in admissible_twigs(&sub)? {
                for (id, c) in twig.ids().iter().zip(bark_chain(&twig)?) {
                    out.add(id, &c);
                }
            }
        }
    }
    Ok(out)
}

/// `D^# = D - Bk D`.
pub fn sharp(g: &DualGraph, kind: BarkKind) -> Result<QDivisor> {
    Ok(QDivisor::reduced(g).sub(&bark(g, kind)?))
}

/// `(K + D - Bk D) . D_i` for every component.
pub fn bark_residuals(g: &DualGraph, bk: &QDivisor) -> Result<Vec<(String, Rational)>> {
    let d = QDivisor::reduced(g);
    let rest = d.sub(bk);
    g.ids()
        .iter()
        .map(|id| {
            let k = rat_i(canonical_degree(g.weight(id)?));
            Ok((id.clone(), k + rest.dot_component(g, id)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryType {
    NegativeDefinite,
    TypeX,
    TypeH,
    /// `d` of the three maximal twigs, in twig order.
    TypeY([BigInt; 3]),
    Other,
}

impl fmt::Display for BoundaryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryType::NegativeDefinite => write!(f, "negative-definite"),
            BoundaryType::TypeX => write!(f, "X"),
            BoundaryType::TypeH => write!(f, "H"),
            BoundaryType::TypeY([a, b, c]) => write!(f, "Y({a},{b},{c})"),
            BoundaryType::Other => write!(f, "other"),
        }
    }
}

fn is_minus_two_tip(g: &DualGraph, i: usize) -> bool {
    g.degree_idx(i) == 1 && g.weight_at(i) == -2
}

pub fn classify_boundary(g: &DualGraph) -> Result<BoundaryType> {
    if !g.is_connected() || g.is_empty() {
        return Err(Error::Disconnected);
    }
    require_tree(g)?;
    if is_negative_definite(&g.intersection_matrix())? {
        return Ok(BoundaryType::NegativeDefinite);
    }
    let branching = g.branching_vertices();
    let tips_around = |b: usize| g.neighbors_idx(b).iter().filter(|&&n| is_minus_two_tip(g, n)).count();
    match branching.as_slice() {
        [c] if g.len() == 5 && g.degree_idx(*c) == 4 && tips_around(*c) == 4 => {
            return Ok(BoundaryType::TypeX)
        }
        [a, b]
            if g.degree_idx(*a) == 3
                && g.degree_idx(*b) == 3
                && tips_around(*a) == 2
                && tips_around(*b) == 2 =>
        {
            return Ok(BoundaryType::TypeH)
        }
        [c] if g.degree_idx(*c) == 3 => {
            let twigs = g.maximal_twigs()?;
            if twigs.len() == 3 && twigs.iter().all(Chain::is_admissible) {
                let ds: Vec<BigInt> = twigs.iter().map(chain_discriminant).collect();
                let delta: Rational = ds.iter().map(|d| Rational::new(BigInt::one(), d.clone())).sum();
                if delta.is_one() {
                    return Ok(BoundaryType::TypeY([ds[0].clone(), ds[1].clone(), ds[2].clone()]));
                }
            }
        }
        _ => {}
    }
    Ok(BoundaryType::Other)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KobayashiReport {
    pub holds: bool,
    pub lhs: Rational,
    pub rhs: Rational,
    pub slack: Rational,
}

/// `chi(X - D) + sum 1/|G_P| >= (K + D^#)^2 / 3`, evaluated exactly.
pub fn kobayashi_check(
    chi_open: i64,
    group_orders: &[u64],
    kd_sharp_sq: &Rational,
) -> Result<KobayashiReport> {
    if let Some(o) = group_orders.iter().find(|&&o| o < 2) {
        return Err(Error::Dimension(format!("group order {o} < 2")));
    }
    let lhs = rat_i(chi_open)
        + group_orders.iter().map(|&o| Rational::new(BigInt::one(), BigInt::from(o))).sum::<Rational>();
    let rhs = kd_sharp_sq / rat_i(3);
    let slack = &lhs - &rhs;
    Ok(KobayashiReport { holds: !slack.is_negative(), lhs, rhs, slack })
}

/// `H_1` of the plumbed 3-manifold of a forest of rational curves, i.e. `coker Q(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlumbingHomology {
    pub free_rank: usize,
    pub torsion: TorsionGroup,
}

impl PlumbingHomology {
    /// Nontrivial invariant factors, `0` standing for a free summand.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut out = self.torsion.factors().to_vec();
        out.extend(std::iter::repeat_n(BigInt::zero(), self.free_rank));
        out
    }
}

impl fmt::Display for PlumbingHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.free_rank, self.torsion.is_trivial()) {
            (0, _) => write!(f, "{}", self.torsion),
            (r, true) => write!(f, "Z^{r}"),
            (r, false) => write!(f, "Z^{r}+{}", self.torsion),
        }
    }
}

pub fn plumbing_homology(g: &DualGraph) -> Result<PlumbingHomology> {
    if !g.is_forest() {
        return Err(Error::NotATree("graph contains a cycle".into()));
    }
    let snf = smith_normal_form(&g.intersection_matrix());
    let free_rank = g.len() - snf.rank();
    let torsion = TorsionGroup::from_factors(snf.diagonal().into_iter().filter(|d| !d.is_zero()))?;
    Ok(PlumbingHomology { free_rank, torsion })
}

/// Intersection matrix of a rational vector against itself: `x^T Q x`.
pub fn self_intersection(g: &DualGraph, d: &QDivisor) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (id, c) in d.iter() {
        acc += c * d.dot_component(g, id)?;
    }
    Ok(acc)
}

/// Whether `Q` restricted to the support of `d` is negative definite (true for `d = 0`).
pub fn support_negative_definite(g: &DualGraph, d: &QDivisor) -> Result<bool> {
    let idx = g.indices_of(&d.support())?;
    let q: IntMatrix = g.intersection_matrix_on(&idx);
    is_negative_definite(&q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_support::fork;
    use crate::linalg::{rat, ratio};

    #[test]
    fn plumbing_homology_examples() {
        let ch = DualGraph::chain_from_weights("A", &[-2, -2]);
        assert_eq!(plumbing_homology(&ch).unwrap().to_string(), "Z3");
        let y244 = fork(-1, &[&[2], &[2, 2, 2], &[2, 2, 2]]);
        assert_eq!(plumbing_homology(&y244).unwrap().to_string(), "Z2+Z16");
        let y333 = fork(-1, &[&[2, 2], &[2, 2], &[2, 2]]);
        assert_eq!(plumbing_homology(&y333).unwrap().to_string(), "Z3+Z9");
        let zero = DualGraph::chain_from_weights("F", &[0]);
        let h = plumbing_homology(&zero).unwrap();
        assert_eq!((h.to_string(), h.invariant_factors()), ("Z^1".into(), vec![BigInt::zero()]));
        assert_eq!(plumbing_homology(&DualGraph::chain_from_weights("C", &[-1])).unwrap().to_string(), "0");
    }

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn chain(bracket: &[i64]) -> Chain {
        Chain::from_bracket(bracket)
    }

    #[test]
    fn discriminant_examples() {
        let g = fork(-1, &[&[3], &[3], &[3]]);
        assert_eq!(discriminant::<&str>(&g, &[]).unwrap(), bi(1));
        assert_eq!(discriminant_graph(&g), bi(0));
        for (b, d) in [(&[2][..], 2), (&[2, 2, 2], 4), (&[3], 3), (&[6], 6)] {
            assert_eq!(chain_discriminant(&chain(b)), bi(d));
        }
        assert!(matches!(discriminant(&g, &["nope"]), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn branch_formula_examples() {
        let single = DualGraph::chain_from_weights("R", &[-2]);
        assert_eq!(det_branch_formula(&single, "R1").unwrap(), bi(2));
        let y1a = fork(-1, &[&[3], &[3], &[3]]);
        assert_eq!(det_branch_formula(&y1a, "B").unwrap(), bi(0));
        let y2a = fork(-1, &[&[2], &[4], &[4]]);
        assert_eq!(det_branch_formula(&y2a, "B").unwrap(), bi(0));
        for v in y2a.ids() {
            assert_eq!(det_branch_formula(&y2a, v).unwrap(), discriminant_graph(&y2a));
        }
        let mut cyc = DualGraph::chain_from_weights("R", &[-2, -2, -2]);
        cyc.add_edge("R1", "R3").unwrap();
        assert!(det_branch_formula(&cyc, "R1").is_err());
    }

    #[test]
    fn join_formula_examples() {
        let g = DualGraph::chain_from_weights("R", &[-2, -2]);
        assert_eq!(det_join_formula(&g, &["R1"], &["R2"]).unwrap(), bi(3));
        let g = DualGraph::chain_from_weights("R", &[-2, -2, -2]);
        assert_eq!(det_join_formula(&g, &["R1", "R2"], &["R3"]).unwrap(), bi(4));
        let g = DualGraph::chain_from_weights("R", &[-1, -1]);
        assert_eq!(det_join_formula(&g, &["R1"], &["R2"]).unwrap(), bi(0));
        let g = DualGraph::chain_from_weights("R", &[-2, -2, -2]);
        assert!(matches!(det_join_formula(&g, &["R1", "R3"], &["R2"]), Err(Error::InvalidJoin(_))));
        assert!(matches!(det_join_formula(&g, &["R1"], &["R2"]), Err(Error::InvalidJoin(_))));
    }

    #[test]
    fn chain_invariant_examples() {
        let c = chain_invariants(&chain(&[2])).unwrap();
        assert_eq!((c.d, c.d_prime), (bi(2), bi(1)));
        assert_eq!((c.e, c.e_tilde, c.delta), (ratio(1, 2), ratio(1, 2), ratio(1, 2)));

        let c = chain_invariants(&chain(&[2, 2, 2])).unwrap();
        assert_eq!((c.d, c.d_prime), (bi(4), bi(3)));
        assert_eq!((c.e, c.e_tilde), (ratio(3, 4), ratio(3, 4)));

        let c = chain_invariants(&chain(&[3, 2])).unwrap();
        assert_eq!((c.d, c.d_prime), (bi(5), bi(2)));
        assert_eq!((c.e, c.e_tilde), (ratio(2, 5), ratio(3, 5)));

        assert!(chain_invariants(&chain(&[2, 1])).is_err());
        assert_eq!(chain_d_dprime(&chain(&[2, 1, 2])), (bi(0), bi(1)));
    }

    #[test]
    fn bark_chain_examples() {
        assert_eq!(bark_chain(&chain(&[2])).unwrap(), vec![ratio(1, 2)]);
        assert_eq!(bark_chain(&chain(&[2, 2])).unwrap(), vec![ratio(2, 3), ratio(1, 3)]);
        assert_eq!(bark_chain(&chain(&[3])).unwrap(), vec![ratio(1, 3)]);
        assert!(bark_chain(&chain(&[1])).is_err());
    }

    #[test]
    fn bark_examples() {
        let lone = DualGraph::chain_from_weights("R", &[-2]);
        let bk = bark(&lone, BarkKind::Auto).unwrap();
        assert_eq!(bk.coefficient("R1"), rat(1));
        assert!(sharp(&lone, BarkKind::Auto).unwrap().is_zero());

        let y = fork(-1, &[&[2], &[2, 2, 2], &[2, 2, 2]]);
        let bk = bark(&y, BarkKind::Auto).unwrap();
        assert_eq!(bk.coefficient("T1_1"), ratio(1, 2));
        let t2: Vec<Rational> = ["T2_1", "T2_2", "T2_3"].iter().map(|i| bk.coefficient(i)).collect();
        assert_eq!(t2, vec![ratio(3, 4), ratio(1, 2), ratio(1, 4)]);
        assert_eq!(bk.coefficient("B"), rat(0));

        let sh = sharp(&y, BarkKind::Auto).unwrap();
        assert_eq!(sh.coefficient("B"), rat(1));
        assert_eq!(sh.coefficient("T2_1"), ratio(1, 4));

        let zero = DualGraph::chain_from_weights("R", &[0]);
        assert_eq!(sharp(&zero, BarkKind::Auto).unwrap(), QDivisor::reduced(&zero));
    }

    #[test]
    fn bark_residuals_vanish_on_support_region() {
        let y = fork(-1, &[&[2, 2], &[3], &[2, 3, 2]]);
        let bk = bark(&y, BarkKind::Twigs).unwrap();
        for (id, r) in bark_residuals(&y, &bk).unwrap() {
            if id != "B" {
                assert!(r.is_zero(), "{id}: {r}");
            }
        }
        assert!(support_negative_definite(&y, &bk).unwrap());
    }

    #[test]
    fn bark_refusals() {
        let nonmin = DualGraph::chain_from_weights("R", &[-2, -1]);
        assert!(matches!(bark(&nonmin, BarkKind::Auto), Err(Error::NotMinimal(_))));
        let bad_twig = fork(-1, &[&[2], &[0], &[2]]);
        assert!(matches!(bark(&bad_twig, BarkKind::Auto), Err(Error::NotAdmissible(_))));
        let deg = DualGraph::from_parts(&[("a", 0)], &[]).unwrap();
        assert_eq!(bark(&deg, BarkKind::WholeComponent), Err(Error::Singular));
    }

    #[test]
    fn admissible_fork_bark_is_whole_component() {
        // E6
        let e6 = fork(-2, &[&[2], &[2, 2], &[2, 2]]);
        assert!(is_admissible_fork(&e6));
        let bk = bark(&e6, BarkKind::Auto).unwrap();
        // all (-2)-curves: bark equals the divisor itself
        assert_eq!(bk, QDivisor::reduced(&e6));
        // negative definite, but delta = 1/2 + 1/3 + 1/13 < 1
        let y237 = fork(-2, &[&[2], &[2, 2], &[2, 2, 2, 2, 2, 3]]);
        assert!(is_negative_definite(&y237.intersection_matrix()).unwrap());
        assert!(!is_admissible_fork(&y237));
    }

    #[test]
    fn classification() {
        let y = fork(-1, &[&[2, 2], &[2, 2], &[2, 2]]);
        assert_eq!(classify_boundary(&y).unwrap(), BoundaryType::TypeY([bi(3), bi(3), bi(3)]));
        let x = fork(-1, &[&[2], &[2], &[2], &[2]]);
        assert_eq!(classify_boundary(&x).unwrap(), BoundaryType::TypeX);
        let nd = DualGraph::chain_from_weights("R", &[-2, -2, -2]);
        assert_eq!(classify_boundary(&nd).unwrap(), BoundaryType::NegativeDefinite);
        let h = DualGraph::from_parts(
            &[("a", -2), ("b", -2), ("c", -2), ("d", -2), ("p", 0), ("m", -3), ("q", -1)],
            &[("a", "p"), ("b", "p"), ("p", "m"), ("m", "q"), ("q", "c"), ("q", "d")],
        )
        .unwrap();
        assert_eq!(classify_boundary(&h).unwrap(), BoundaryType::TypeH);
        let not_y = fork(-1, &[&[2], &[2], &[2, 2]]);
        assert_eq!(classify_boundary(&not_y).unwrap(), BoundaryType::Other);
        let two = DualGraph::from_parts(&[("a", -1), ("b", -1)], &[]).unwrap();
        assert_eq!(classify_boundary(&two), Err(Error::Disconnected));
    }

    #[test]
    fn kobayashi_examples() {
        let r = kobayashi_check(0, &[2], &rat(0)).unwrap();
        assert!(r.holds);
        assert_eq!(r.slack, ratio(1, 2));
        let r = kobayashi_check(0, &[3], &rat(0)).unwrap();
        assert_eq!(r.slack, ratio(1, 3));
        let r = kobayashi_check(-1, &[2], &rat(0)).unwrap();
        assert!(!r.holds);
        assert_eq!(r.slack, ratio(-1, 2));
        assert!(kobayashi_check(0, &[1], &rat(0)).is_err());
    }

    #[test]
    fn delta_of_case_forks() {
        assert_eq!(delta(&fork(-1, &[&[2], &[2, 2, 2], &[2, 2, 2]])).unwrap(), rat(1));
        assert_eq!(delta(&fork(-1, &[&[2], &[3], &[6]])).unwrap(), rat(1));
        assert_eq!(e_sum(&fork(-1, &[&[2], &[2], &[2]])).unwrap(), ratio(3, 2));
    }
}
