//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unialg::affine::{
    check_ring_and_module, commutator_day, difference_term, module_reconstruct, verify_difference_term,
};
use unialg::commutator::{center, commutator_delta, commutator_tc, CmGate};
use unialg::conditions::{
    find_day_terms, find_gumm_terms, find_jonsson_terms, find_maltsev_term, ChainKind, SearchOutcome, TermChain,
    DEFAULT_CAP3, DEFAULT_CAP4,
};
use unialg::congruence::{
    cg, cg_with_witnesses, chain_replays, kernel, maltsev_chain, permutes, transport_backward, transport_forward,
};
use unialg::corpus::{builtin, BUILTIN_NAMES};
use unialg::lattice::{con_all, lattice_properties};
use unialg::{Error, FiniteAlgebra, Partition};

const CAP: usize = 1_000_000;
const SEED: u64 = 20_241_016;
const LIMIT_GROUP_ORACLE: Duration = Duration::from_secs(10);
const LIMIT_AGREEMENT: Duration = Duration::from_secs(60);
const LIMIT_AFFINE: Duration = Duration::from_secs(30);

const GROUPS: &[&str] = &["Z2", "Z4", "V4", "S3", "D4"];
const RINGS: &[&str] = &["zeroring2", "zeroring4"];
const LATTICES: &[&str] = &["lattice2", "chain3", "M3lat", "N5lat"];

type Check = Result<(), String>;

fn alg(name: &str) -> FiniteAlgebra {
    builtin(name).expect("builtin")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn congruences(a: &FiniteAlgebra) -> Vec<Partition> {
    con_all(a, CAP).expect("Con(A)").elements().to_vec()
}

fn day(a: &FiniteAlgebra) -> Option<TermChain> {
    find_day_terms(a, DEFAULT_CAP4).expect("search").found().cloned()
}

/// A group read from its binary operation alone.
struct Group {
    n: usize,
    mul: Vec<usize>,
    e: usize,
    inv: Vec<usize>,
}

impl Group {
    fn of(a: &FiniteAlgebra) -> Group {
        let n = a.size;
        let op = a.operations.iter().find(|o| o.arity == 2).expect("binary op");
        let mul = op.table.clone();
        let e = (0..n).find(|&e| (0..n).all(|x| mul[e * n + x] == x)).expect("identity");
        let inv = (0..n)
            .map(|x| (0..n).find(|&y| mul[x * n + y] == e).expect("inverse"))
            .collect();
        Group { n, mul, e, inv }
    }

    fn m(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    fn generated(&self, gens: &[usize]) -> Vec<bool> {
        let mut member = vec![false; self.n];
        member[self.e] = true;
        let mut list = vec![self.e];
        let mut i = 0;
        while i < list.len() {
            for &g in gens {
                let h = self.m(list[i], g);
                if !member[h] {
                    member[h] = true;
                    list.push(h);
                }
            }
            i += 1;
        }
        member
    }

    /// Normal subgroups, by brute force over subsets.
    fn normal_subgroups(&self) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << self.n) {
            let s: Vec<bool> = (0..self.n).map(|i| mask >> i & 1 == 1).collect();
            if !s[self.e] {
                continue;
            }
            let elems: Vec<usize> = (0..self.n).filter(|&i| s[i]).collect();
            let closed = elems.iter().all(|&a| elems.iter().all(|&b| s[self.m(a, b)]));
            let normal = elems
                .iter()
                .all(|&a| (0..self.n).all(|g| s[self.m(self.m(g, a), self.inv[g])]));
            if closed && normal {
                out.push(s);
            }
        }
        out
    }

    fn commutator_subgroup(&self, m: &[bool], k: &[bool]) -> Vec<bool> {
        let mut gens = Vec::new();
        for a in (0..self.n).filter(|&i| m[i]) {
            for b in (0..self.n).filter(|&i| k[i]) {
                gens.push(self.m(self.m(a, b), self.m(self.inv[a], self.inv[b])));
            }
        }
        self.generated(&gens)
    }

    fn center(&self) -> Vec<bool> {
        (0..self.n)
            .map(|z| (0..self.n).all(|x| self.m(z, x) == self.m(x, z)))
            .collect()
    }

    /// `x Θ_N y` iff `x y⁻¹ ∈ N`.
    fn theta(&self, normal: &[bool]) -> Partition {
        let mut ids = vec![0; self.n];
        for x in 0..self.n {
            ids[x] = (0..self.n).find(|&y| normal[self.m(x, self.inv[y])]).expect("x itself");
        }
        Partition::from_ids(ids).expect("canonical")
    }
}

fn c1_group_oracle() -> Check {
    for name in ["Z4", "V4", "S3", "D4"] {
        let a = alg(name);
        let g = Group::of(&a);
        let normals = g.normal_subgroups();
        let con: HashSet<Partition> = congruences(&a).into_iter().collect();
        let thetas: HashSet<Partition> = normals.iter().map(|s| g.theta(s)).collect();
        ensure(con == thetas, || {
            format!("{name}: Con(A) differs from normal subgroup lattice")
        })?;
        for m in &normals {
            for k in &normals {
                let expected = g.theta(&g.commutator_subgroup(m, k));
                let got = commutator_tc(&a, &g.theta(m), &g.theta(k), CAP).map_err(err)?;
                ensure(got == expected, || {
                    format!("{name}: got {got}, group oracle {expected}")
                })?;
            }
        }
    }
    Ok(())
}

fn c2_three_algorithms() -> Check {
    for &name in BUILTIN_NAMES {
        let a = alg(name);
        let Some(d) = day(&a) else { continue };
        let con = congruences(&a);
        for x in &con {
            for y in &con {
                let tc = commutator_tc(&a, x, y, CAP).map_err(err)?;
                let dy = commutator_day(&a, &d, x, y, CAP).map_err(err)?;
                let dl = commutator_delta(&a, x, y, CmGate::Day(&d)).map_err(err)?;
                ensure(tc == dy && dy == dl, || {
                    format!("{name} [{x}, {y}]: tc {tc}, day {dy}, delta {dl}")
                })?;
            }
        }
    }
    Ok(())
}

fn expect_found(a: &FiniteAlgebra, outcome: SearchOutcome<TermChain>, kind: ChainKind) -> Check {
    match outcome {
        SearchOutcome::Found(c) => {
            ensure(c.kind == kind, || format!("{}: wrong kind {}", a.name, c.kind))?;
            ensure(c.verify(a).map_err(err)?, || {
                format!("{}: {c} fails its identities", a.name)
            })
        }
        other => Err(format!("{}: {kind} {}", a.name, other.label())),
    }
}

fn expect_none(a: &FiniteAlgebra, outcome: SearchOutcome<TermChain>, kind: ChainKind) -> Check {
    ensure(outcome.is_none(), || format!("{}: {kind} {}", a.name, outcome.label()))
}

fn c3_maltsev() -> Check {
    for name in ["Z2", "Z4", "S3", "zeroring2"] {
        let a = alg(name);
        expect_found(
            &a,
            find_maltsev_term(&a, DEFAULT_CAP3).map_err(err)?,
            ChainKind::Maltsev,
        )?;
    }
    for name in ["set2", "semilattice2", "lattice2", "chain3"] {
        let a = alg(name);
        expect_none(&a, find_maltsev_term(&a, usize::MAX).map_err(err)?, ChainKind::Maltsev)?;
    }
    Ok(())
}

fn c4_jonsson() -> Check {
    for &name in LATTICES {
        let a = alg(name);
        expect_found(
            &a,
            find_jonsson_terms(&a, DEFAULT_CAP3).map_err(err)?,
            ChainKind::Jonsson,
        )?;
    }
    let z2 = alg("Z2");
    expect_none(
        &z2,
        find_jonsson_terms(&z2, usize::MAX).map_err(err)?,
        ChainKind::Jonsson,
    )
}

fn c5_day_gumm() -> Check {
    for &name in GROUPS.iter().chain(RINGS).chain(LATTICES) {
        let a = alg(name);
        expect_found(&a, find_day_terms(&a, DEFAULT_CAP4).map_err(err)?, ChainKind::Day)?;
        expect_found(&a, find_gumm_terms(&a, DEFAULT_CAP3).map_err(err)?, ChainKind::Gumm)?;
    }
    for name in ["semilattice2", "set2"] {
        let a = alg(name);
        expect_none(&a, find_day_terms(&a, usize::MAX).map_err(err)?, ChainKind::Day)?;
        expect_none(&a, find_gumm_terms(&a, usize::MAX).map_err(err)?, ChainKind::Gumm)?;
    }
    Ok(())
}

fn c6_distributive() -> Check {
    for &name in LATTICES {
        let a = alg(name);
        let con = congruences(&a);
        for x in &con {
            for y in &con {
                let c = commutator_tc(&a, x, y, CAP).map_err(err)?;
                ensure(c == x.meet(y), || format!("{name}: [{x}, {y}] = {c}"))?;
            }
        }
    }
    Ok(())
}

fn is_abelian(a: &FiniteAlgebra) -> Result<bool, String> {
    let one = Partition::full(a.size);
    Ok(commutator_tc(a, &one, &one, CAP).map_err(err)?.is_discrete())
}

fn c7_abelian() -> Check {
    for name in ["set2", "zeroring2", "zeroring4", "Z2", "Z4", "V4"] {
        ensure(is_abelian(&alg(name))?, || format!("{name} should be abelian"))?;
    }
    for name in ["S3", "D4", "lattice2", "chain3", "semilattice2", "M3lat", "N5lat"] {
        ensure(!is_abelian(&alg(name))?, || format!("{name} should not be abelian"))?;
    }
    Ok(())
}

fn c8_center() -> Check {
    let s3 = alg("S3");
    ensure(center(&s3, CAP).map_err(err)?.is_discrete(), || "ζ(S3) != 0".into())?;
    let d4 = alg("D4");
    let g = Group::of(&d4);
    let z = g.center();
    ensure(z.iter().filter(|&&b| b).count() == 2, || {
        "Z(D4) should have order 2".into()
    })?;
    let got = center(&d4, CAP).map_err(err)?;
    ensure(got == g.theta(&z), || format!("ζ(D4) = {got}"))?;
    ensure(center(&alg("Z4"), CAP).map_err(err)?.is_full(), || "ζ(Z4) != 1".into())?;
    for &name in BUILTIN_NAMES {
        let a = alg(name);
        let full = center(&a, CAP).map_err(err)?.is_full();
        ensure(full == is_abelian(&a)?, || format!("{name}: center = 1 is {full}"))?;
    }
    Ok(())
}

fn c9_m3() -> Check {
    let v4 = alg("V4");
    let lat = con_all(&v4, CAP).map_err(err)?;
    let triple = lattice_properties(&lat).m3_01.ok_or("no M3 (0,1)-triple in Con(V4)")?;
    for (i, &x) in triple.iter().enumerate() {
        for &y in &triple[i + 1..] {
            ensure(lat.meet(x, y) == lat.bottom() && lat.join(x, y) == lat.top(), || {
                format!("{triple:?} is not a (0,1)-sublattice")
            })?;
        }
    }
    for &name in BUILTIN_NAMES {
        let a = alg(name);
        let lat = con_all(&a, CAP).map_err(err)?;
        if lattice_properties(&lat).m3_01.is_some() {
            ensure(is_abelian(&a)?, || format!("{name} has M3 but is not abelian"))?;
        }
    }
    Ok(())
}

fn c10_difference_term() -> Check {
    for &name in BUILTIN_NAMES {
        let a = alg(name);
        let Some(chain) = day(&a) else { continue };
        let d = difference_term(&a, &chain).map_err(err)?;
        let report = verify_difference_term(&a, &d, CAP).map_err(err)?;
        ensure(report.holds(), || format!("{name}: {d} fails {report:?}"))?;
        if name == "Z2" || name == "Z4" {
            let n = a.size;
            let table = d.table(&a, 3).map_err(err)?;
            let mut expected = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        expected.push((x + n - y + z) % n);
                    }
                }
            }
            ensure(table == expected, || format!("{name}: d is not x-y+z"))?;
        }
    }
    Ok(())
}

fn c11_affine() -> Check {
    for name in ["Z2", "Z4", "V4", "zeroring2", "zeroring4"] {
        let a = alg(name);
        let n = a.size;
        let rep = module_reconstruct(&a, 0, CAP).map_err(err)?;
        check_ring_and_module(&rep, n).map_err(|e| format!("{name}: {e}"))?;
        let add = |x: usize, y: usize| rep.plus[x * n + y];
        for x in 0..n {
            for y in 0..n {
                let p = |args: [usize; 3]| rep.maltsev.eval(&a, &args);
                ensure(p([x, y, y]) == Ok(x) && p([y, y, x]) == Ok(x), || {
                    format!("{name}: not Mal'tsev")
                })?;
                ensure(p([x, 0, y]) == Ok(add(x, y)), || format!("{name}: + is not p(x,0,y)"))?;
            }
        }
        for (r, el) in rep.ring.iter().enumerate() {
            for x in 0..n {
                ensure(el.term.eval(&a, &[x]) == Ok(el.function[x]), || {
                    format!("{name}: r{r} term")
                })?;
                ensure(rep.action[r * n + x] == el.function[x], || {
                    format!("{name}: r{r} action")
                })?;
            }
        }
        for dec in &rep.decompositions {
            let op = a.op(&dec.symbol).ok_or("decomposed unknown symbol")?;
            let mut bad = None;
            unialg::algebra::for_each_tuple(n, op.arity, |args| {
                let mut v = dec.constant;
                for (&r, &x) in dec.coefficients.iter().zip(args) {
                    v = add(v, rep.action[r * n + x]);
                }
                if v != op.apply(n, args) && bad.is_none() {
                    bad = Some(args.to_vec());
                }
            });
            ensure(bad.is_none(), || {
                format!("{name}: {} decomposition fails at {bad:?}", dec.symbol)
            })?;
        }
        if name == "Z4" {
            ensure(rep.ring.len() == 4, || {
                format!("Z4 ring has {} elements", rep.ring.len())
            })?;
        }
    }
    for name in ["S3", "set2"] {
        match module_reconstruct(&alg(name), 0, CAP) {
            Err(Error::NotAffineEligible(_)) => {}
            other => return Err(format!("{name}: expected not affine-eligible, got {other:?}")),
        }
    }
    Ok(())
}

fn product_congruence(left: &Partition, right: &Partition) -> Partition {
    let m = right.len();
    Partition::from_keys(left.len() * m, |x| (left.block_id(x / m), right.block_id(x % m)))
}

fn c12_hsp() -> Check {
    let s3 = alg("S3");
    // 3 is a 3-cycle, so this is the congruence of A3.
    let a3 = cg(&s3, &[(0, 3)]);
    ensure(a3.num_blocks() == 2, || {
        format!("S3: expected index-2 kernel, got {a3}")
    })?;
    let z4 = alg("Z4");
    let (z2_of_z4, to_z2) = (alg("Z2"), (0..4).map(|x| x % 2).collect::<Vec<_>>());
    let (s3_quot, to_quot) = s3.quotient(&a3).map_err(err)?;
    for (a, b, f) in [(&s3, &s3_quot, &to_quot), (&z4, &z2_of_z4, &to_z2)] {
        ensure(b.size == 2, || "target should have two elements".into())?;
        let con = congruences(a);
        for x in &con {
            for y in &con {
                let lhs = commutator_tc(
                    b,
                    &transport_forward(a, b, f, x).map_err(err)?,
                    &transport_forward(a, b, f, y).map_err(err)?,
                    CAP,
                )
                .map_err(err)?;
                let rhs = transport_forward(a, b, f, &commutator_tc(a, x, y, CAP).map_err(err)?).map_err(err)?;
                ensure(lhs == rhs, || {
                    format!("{}: [f({x}), f({y})] = {lhs}, f([..]) = {rhs}", a.name)
                })?;
            }
        }
    }
    let z2 = alg("Z2");
    let prod = z2.product(&z4).map_err(err)?;
    let (c2, c4) = (congruences(&z2), congruences(&z4));
    for a1 in &c2 {
        for b1 in &c2 {
            for a2 in &c4 {
                for b2 in &c4 {
                    let lhs = commutator_tc(&prod, &product_congruence(a1, a2), &product_congruence(b1, b2), CAP)
                        .map_err(err)?;
                    let rhs = product_congruence(
                        &commutator_tc(&z2, a1, b1, CAP).map_err(err)?,
                        &commutator_tc(&z4, a2, b2, CAP).map_err(err)?,
                    );
                    ensure(lhs == rhs, || format!("Z2xZ4: {lhs} != {rhs}"))?;
                }
            }
        }
    }
    Ok(())
}

fn random_congruence(a: &FiniteAlgebra, rng: &mut ChaCha8Rng) -> Partition {
    let k = rng.gen_range(0..=2);
    let pairs: Vec<(usize, usize)> = (0..k)
        .map(|_| (rng.gen_range(0..a.size), rng.gen_range(0..a.size)))
        .collect();
    cg(a, &pairs)
}

fn c13_transport() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for name in ["Z4", "S3"] {
        let a = alg(name);
        for kappa in congruences(&a) {
            let (b, f) = a.quotient(&kappa).map_err(err)?;
            ensure(kernel(&f) == kappa, || format!("{name}: kernel of projection"))?;
            for _ in 0..20 {
                let theta = random_congruence(&a, &mut rng);
                let back = transport_backward(&a, &b, &f, &transport_forward(&a, &b, &f, &theta).map_err(err)?)
                    .map_err(err)?;
                ensure(back == theta.join(&kappa), || {
                    format!("{name}/{kappa}: f⁻¹f({theta}) = {back}")
                })?;
                let big = random_congruence(&b, &mut rng);
                let there =
                    transport_forward(&a, &b, &f, &transport_backward(&a, &b, &f, &big).map_err(err)?).map_err(err)?;
                ensure(there == big, || format!("{name}/{kappa}: ff⁻¹({big}) = {there}"))?;
            }
        }
    }
    Ok(())
}

fn c14_witness_replay() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 14);
    for _ in 0..100 {
        let a = alg(BUILTIN_NAMES[rng.gen_range(0..BUILTIN_NAMES.len())]);
        let k = rng.gen_range(1..=3);
        let pairs: Vec<(usize, usize)> = (0..k)
            .map(|_| (rng.gen_range(0..a.size), rng.gen_range(0..a.size)))
            .collect();
        let (p, log) = cg_with_witnesses(&a, &pairs).map_err(err)?;
        ensure(log.replay() == p, || format!("{}: log does not replay to {p}", a.name))?;
        ensure(p == cg(&a, &pairs), || format!("{}: witnessed closure differs", a.name))?;
        for (x, y) in p.pairs() {
            let chain = maltsev_chain(&a, &log, x, y).map_err(err)?;
            ensure(chain_replays(&a, &log, x, y, &chain).map_err(err)?, || {
                format!("{} {pairs:?}: chain {x}..{y} fails", a.name)
            })?;
        }
    }
    Ok(())
}

fn c15_abelian_permutes() -> Check {
    for &name in BUILTIN_NAMES {
        let a = alg(name);
        if day(&a).is_none() {
            continue;
        }
        let con = congruences(&a);
        for x in &con {
            if !commutator_tc(&a, x, x, CAP).map_err(err)?.is_discrete() {
                continue;
            }
            for y in &con {
                ensure(permutes(x, y), || {
                    format!("{name}: abelian {x} does not permute with {y}")
                })?;
            }
        }
    }
    Ok(())
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Check,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "group-oracle commutator",
        limit: Some(LIMIT_GROUP_ORACLE),
        check: c1_group_oracle,
    },
    Criterion {
        id: 2,
        name: "tc = day = delta",
        limit: Some(LIMIT_AGREEMENT),
        check: c2_three_algorithms,
    },
    Criterion {
        id: 3,
        name: "Mal'tsev detection",
        limit: None,
        check: c3_maltsev,
    },
    Criterion {
        id: 4,
        name: "Jonsson detection",
        limit: None,
        check: c4_jonsson,
    },
    Criterion {
        id: 5,
        name: "Day/Gumm detection",
        limit: None,
        check: c5_day_gumm,
    },
    Criterion {
        id: 6,
        name: "distributive commutator is meet",
        limit: None,
        check: c6_distributive,
    },
    Criterion {
        id: 7,
        name: "abelian classification",
        limit: None,
        check: c7_abelian,
    },
    Criterion {
        id: 8,
        name: "center",
        limit: None,
        check: c8_center,
    },
    Criterion {
        id: 9,
        name: "M3 in Con(V4)",
        limit: None,
        check: c9_m3,
    },
    Criterion {
        id: 10,
        name: "difference term",
        limit: None,
        check: c10_difference_term,
    },
    Criterion {
        id: 11,
        name: "affine reconstruction",
        limit: Some(LIMIT_AFFINE),
        check: c11_affine,
    },
    Criterion {
        id: 12,
        name: "images and products",
        limit: None,
        check: c12_hsp,
    },
    Criterion {
        id: 13,
        name: "transport along quotient maps",
        limit: None,
        check: c13_transport,
    },
    Criterion {
        id: 14,
        name: "witness replay",
        limit: None,
        check: c14_witness_replay,
    },
    Criterion {
        id: 15,
        name: "abelian congruences permute",
        limit: None,
        check: c15_abelian_permutes,
    },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in CRITERIA {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(()), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (r, _) => r,
        };
        match result {
            Ok(()) => println!("PASS {:>2} {} ({elapsed:.2?})", c.id, c.name),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {} ({elapsed:.2?}): {e}", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
