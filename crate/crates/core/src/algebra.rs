//! Cuntz-Krieger families and the operator algebra generated by a graph of
//! completely positive maps.
//!
//! Everything acts on the direct sum `H = (+)_x H(x)` in vertex order, with
//! vertex `x` owning the coordinate block at [`CausalGraph::block_offset`].

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::causal::CausalGraph;
use crate::channel::{KrausMap, LinearMap};
use crate::error::{Error, Result};
use crate::matkernel::{hermitian_eigen, Matrix, Subspace, CONTAINS_TOL};
use crate::report::{Check, Report};
use crate::scalar::{Real, C};
use crate::tolerance::Tolerances;

/// Vertex projections `P_x` and edge partial isometries `S_e`, all `D x D`.
#[derive(Clone, Debug, PartialEq)]
pub struct CkFamily<T> {
    pub graph: CausalGraph,
    pub projections: BTreeMap<String, Matrix<T>>,
    pub isometries: BTreeMap<String, Matrix<T>>,
}

/// Orthogonal projection onto the coordinate block of `x`.
pub fn vertex_projection<T: Real>(graph: &CausalGraph, x: &str) -> Result<Matrix<T>> {
    let d = graph.total_dim();
    let offset = graph.block_offset(x)?;
    let n = graph.dim(x)?;
    Ok(Matrix::identity(n).embed_block(d, d, offset, offset))
}

/// `a: H(source) -> H(target)` placed in block `(target, source)` of a `D x D` matrix.
pub fn embed_edge_operator<T: Real>(graph: &CausalGraph, source: &str, target: &str, a: &Matrix<T>) -> Result<Matrix<T>> {
    let (ds, dt) = (graph.dim(source)?, graph.dim(target)?);
    if a.shape() != (dt, ds) {
        return Err(Error::Dim(format!(
            "operator for {source} -> {target} must be {dt}x{ds}, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let d = graph.total_dim();
    Ok(a.embed_block(d, d, graph.block_offset(target)?, graph.block_offset(source)?))
}

impl<T: Real> CkFamily<T> {
    pub fn new(
        graph: CausalGraph,
        projections: BTreeMap<String, Matrix<T>>,
        isometries: BTreeMap<String, Matrix<T>>,
    ) -> Result<Self> {
        let d = graph.total_dim();
        for v in graph.vertices() {
            if !projections.contains_key(&v.id) {
                return Err(Error::Vertex(format!("{} has no projection", v.id)));
            }
        }
        for e in graph.edges() {
            if !isometries.contains_key(&e.id) {
                return Err(Error::Edge(format!("{} has no partial isometry", e.id)));
            }
        }
        for (id, m) in &projections {
            graph.dim(id)?;
            if m.shape() != (d, d) {
                return Err(Error::Dim(format!("projection {id} must be {d}x{d}")));
            }
        }
        for (id, m) in &isometries {
            graph.edge(id)?;
            if m.shape() != (d, d) {
                return Err(Error::Dim(format!("isometry {id} must be {d}x{d}")));
            }
        }
        Ok(Self { graph, projections, isometries })
    }

    /// Coordinate projections plus `S_e` given by its `dim(target) x dim(source)` block.
    pub fn from_blocks(graph: CausalGraph, blocks: &BTreeMap<String, Matrix<T>>) -> Result<Self> {
        let mut projections = BTreeMap::new();
        for v in graph.vertices() {
            projections.insert(v.id.clone(), vertex_projection(&graph, &v.id)?);
        }
        let mut isometries = BTreeMap::new();
        for e in graph.edges() {
            let b = blocks.get(&e.id).ok_or_else(|| Error::Edge(format!("{} has no partial isometry", e.id)))?;
            isometries.insert(e.id.clone(), embed_edge_operator(&graph, &e.source, &e.target, b)?);
        }
        Self::new(graph, projections, isometries)
    }

    pub fn total_dim(&self) -> usize {
        self.graph.total_dim()
    }
}

/// Largest negative part of the spectrum of a Hermitian matrix (0 when PSD).
fn negativity<T: Real>(m: &Matrix<T>) -> Result<f64> {
    Ok((-hermitian_eigen(m)?.min_value().as_f64()).max(0.0))
}

/// Cuntz-Krieger relations: `S_e^dagger S_e = P_s(e)` and `S_e S_e^dagger <= P_r(e)`,
/// together with the projection axioms for every `P_x`.
///
/// With `orthogonal_ranges`, also requires `sum_{r(e) = y} S_e S_e^dagger <= P_y`.
pub fn check_ck_family<T: Real>(f: &CkFamily<T>, tol: f64, orthogonal_ranges: bool) -> Result<Report> {
    let g = &f.graph;
    let d = f.total_dim();
    let mut report = Report::new();
    let mut sum = Matrix::<T>::zeros(d, d);
    for v in g.vertices() {
        let p = &f.projections[&v.id];
        let idem = (&(p * p) - p).frobenius_norm().max(p.hermiticity_residual());
        report.push(Check::below(format!("ck/projection/{}", v.id), idem.as_f64(), tol));
        sum = &sum + p;
    }
    let ids: Vec<&String> = f.projections.keys().collect();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            let prod = (&f.projections[*a] * &f.projections[*b]).frobenius_norm();
            report.push(Check::below(format!("ck/orthogonal/{a},{b}"), prod.as_f64(), tol));
        }
    }
    report.push(Check::below("ck/projection_sum", negativity(&(&Matrix::identity(d) - &sum))?, tol));

    let mut range_sums: BTreeMap<&str, Matrix<T>> = BTreeMap::new();
    for e in g.edges() {
        let s = &f.isometries[&e.id];
        let ps = &f.projections[&e.source];
        let pr = &f.projections[&e.target];
        let ss = s * &s.adjoint();
        let initial = (&(&s.adjoint() * s) - ps).frobenius_norm();
        report.push(Check::below(format!("ck/{}/initial", e.id), initial.as_f64(), tol));
        let inside = (&(pr * &ss) - &ss).frobenius_norm();
        report.push(Check::below(format!("ck/{}/range_inside", e.id), inside.as_f64(), tol));
        report.push(Check::below(format!("ck/{}/range_le", e.id), negativity(&(pr - &ss))?, tol));
        let acc = range_sums.entry(e.target.as_str()).or_insert_with(|| Matrix::zeros(d, d));
        *acc = &*acc + &ss;
    }
    if orthogonal_ranges {
        for (y, total) in &range_sums {
            let n = negativity(&(&f.projections[*y] - total))?;
            report.push(Check::below(format!("ck/ranges/{y}"), n, tol));
        }
    }
    Ok(report)
}

/// `rho -> S' rho S'^dagger` per edge, `S'` being the `(target, source)` block of `S_e`.
pub fn ck_to_channels<T: Real>(f: &CkFamily<T>, tol: &Tolerances) -> Result<BTreeMap<String, KrausMap<T>>> {
    let report = check_ck_family(f, tol.eq, false)?;
    if let Some(c) = report.failures().next() {
        return Err(Error::CkFail(format!("{} (residual {:e})", c.name, c.residual)));
    }
    let g = &f.graph;
    let mut out = BTreeMap::new();
    for e in g.edges() {
        let (ds, dt) = (g.dim(&e.source)?, g.dim(&e.target)?);
        let block = f.isometries[&e.id].block(g.block_offset(&e.target)?, g.block_offset(&e.source)?, dt, ds);
        out.insert(e.id.clone(), KrausMap::new(ds, dt, vec![block])?);
    }
    Ok(out)
}

/// Finite-dimensional *-algebra inside `M_D`, stored as a linear span.
#[derive(Clone, Debug)]
pub struct Algebra<T> {
    pub ambient_dim: usize,
    pub generators: Vec<Matrix<T>>,
    pub span: Subspace<T>,
    /// Product rounds run until the span stopped growing (the last round adds nothing).
    pub iterations: usize,
}

impl<T: Real> Algebra<T> {
    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    /// Worst relative residual of `b_i b_j` and `b_i^dagger` against the span.
    pub fn closure_residual(&self) -> Result<T> {
        let basis = self.span.basis();
        let mut worst = T::zero();
        for a in basis {
            worst = worst.max(self.span.relative_residual(&a.adjoint())?);
            for b in basis {
                worst = worst.max(self.span.relative_residual(&(a * b))?);
            }
        }
        Ok(worst)
    }
}

/// Smallest *-closed span containing `generators` and closed under products.
///
/// `S_0 = span(G u G^dagger)`, then `S_{k+1} = span(S_k u S_k S_k)` until the
/// dimension is stable. Products of two basis vectors that were both present
/// in the previous round are skipped, since they are already in the span.
pub fn generate<T: Real>(ambient_dim: usize, generators: Vec<Matrix<T>>) -> Result<Algebra<T>> {
    let mut span = Subspace::empty(ambient_dim, ambient_dim);
    for g in &generators {
        span.insert(g)?;
        span.insert(&g.adjoint())?;
    }
    let full = ambient_dim * ambient_dim;
    let mut settled = 0;
    let mut iterations = 0;
    while span.dim() > settled && span.dim() < full {
        iterations += 1;
        let snapshot: Vec<Matrix<T>> = span.basis().to_vec();
        let before = snapshot.len();
        'round: for (i, a) in snapshot.iter().enumerate() {
            for (j, b) in snapshot.iter().enumerate() {
                if i < settled && j < settled {
                    continue;
                }
                span.insert(&(a * b))?;
                if span.dim() == full {
                    break 'round;
                }
            }
        }
        settled = before;
        if span.dim() == before {
            break;
        }
    }
    Ok(Algebra { ambient_dim, generators, span, iterations })
}

/// Vertex projections followed by every Kraus operator embedded in its edge block.
pub fn graph_generators<T: Real>(graph: &CausalGraph, channels: &BTreeMap<String, KrausMap<T>>) -> Result<Vec<Matrix<T>>> {
    let mut gens = Vec::new();
    for v in graph.vertices() {
        gens.push(vertex_projection(graph, &v.id)?);
    }
    for (id, map) in channels {
        let e = graph.edge(id)?;
        for a in map.kraus() {
            gens.push(embed_edge_operator(graph, &e.source, &e.target, a)?);
        }
    }
    Ok(gens)
}

/// The algebra generated by the vertex projections and all edge Kraus operators.
pub fn generate_algebra<T: Real>(graph: &CausalGraph, channels: &BTreeMap<String, KrausMap<T>>) -> Result<Algebra<T>> {
    generate(graph.total_dim(), graph_generators(graph, channels)?)
}

/// Orthonormal eigenvectors of a PSD Gram matrix with eigenvalue below
/// `1e-8 * max(1, lambda_max)`, as coefficient columns.
fn null_vectors<T: Real>(gram: &Matrix<T>) -> Result<Vec<Vec<C<T>>>> {
    let eig = hermitian_eigen(gram)?;
    let cutoff = T::floor_tol(1e-8) * T::one().max(eig.max_value());
    let n = gram.rows();
    Ok((0..n)
        .filter(|&k| eig.values[k] < cutoff)
        .map(|k| (0..n).map(|i| eig.vectors[(i, k)]).collect())
        .collect())
}

/// `{X : X G = G X for every generator}`, which equals the commutant of the
/// generated algebra because the generator set is closed under adjoints up to span.
pub fn commutant<T: Real>(alg: &Algebra<T>) -> Result<Subspace<T>> {
    let d = alg.ambient_dim;
    let n = d * d;
    let mut gram = Matrix::<T>::zeros(n, n);
    let mut gens: Vec<Matrix<T>> = alg.generators.clone();
    gens.extend(alg.generators.iter().map(|g| g.adjoint()));
    for g in &gens {
        // X -> G X - X G on row-major vec(X)
        let mut l = Matrix::<T>::zeros(n, n);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    l[(a * d + b, c * d + b)] += g[(a, c)];
                    l[(a * d + b, a * d + c)] -= g[(c, b)];
                }
            }
        }
        gram = &gram + &(&l.adjoint() * &l);
    }
    let mats: Vec<Matrix<T>> =
        null_vectors(&gram)?.into_iter().map(|v| Matrix::new(d, d, v)).collect::<Result<_>>()?;
    let mut s = Subspace::empty(d, d);
    for m in &mats {
        s.insert(m)?;
    }
    Ok(s)
}

/// `span ∩ commutant`, via the coefficients `c` with `sum_k c_k [B_k, G] = 0` for every generator `G`.
pub fn center<T: Real>(alg: &Algebra<T>) -> Result<Subspace<T>> {
    let d = alg.ambient_dim;
    let basis = alg.span.basis();
    let n = basis.len();
    let mut gram = Matrix::<T>::zeros(n.max(1), n.max(1));
    let adjoints: Vec<Matrix<T>> = alg.generators.iter().map(|g| g.adjoint()).collect();
    for g in alg.generators.iter().chain(&adjoints) {
        let comms: Vec<Matrix<T>> = basis.iter().map(|b| b.commutator(g)).collect();
        for k in 0..n {
            for l in k..n {
                let v = comms[k].inner(&comms[l]);
                gram[(k, l)] += v;
                if l != k {
                    gram[(l, k)] += v.conj();
                }
            }
        }
    }
    let mut z = Subspace::empty(d, d);
    if n == 0 {
        return Ok(z);
    }
    for coeffs in null_vectors(&gram)? {
        let mut m = Matrix::zeros(d, d);
        for (c, b) in coeffs.iter().zip(basis) {
            m = &m + &b.scale(*c);
        }
        z.insert(&m)?;
    }
    Ok(z)
}

const BLOCK_ATTEMPTS: usize = 5;
const EIGEN_GAP: f64 = 1e-8;

/// Minimal central projection `p` with the block `p A p ≅ M_n (x) 1_m`.
#[derive(Clone, Debug)]
pub struct CentralBlock<T> {
    pub n: usize,
    pub m: usize,
    pub projection: Matrix<T>,
}

/// Wedderburn decomposition `A ≅ (+)_k M_{n_k} (x) 1_{m_k}`, blocks sorted by
/// decreasing `(n_k, m_k)`.
///
/// The minimal central projections are the spectral projections of a random
/// self-adjoint central element. A draw whose distinct eigenvalues collide
/// (gap below `1e-8`) is retried, up to five times.
pub fn central_blocks<T: Real>(alg: &Algebra<T>, seed: u64) -> Result<Vec<CentralBlock<T>>> {
    let d = alg.ambient_dim;
    if alg.dim() == 0 {
        return Ok(Vec::new());
    }
    let z = center(alg)?;
    let mut hermitian = Vec::new();
    for b in z.basis() {
        hermitian.push(b.hermitian_part());
        hermitian.push(b.scale(C::new(T::zero(), -T::one())).hermitian_part());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..BLOCK_ATTEMPTS {
        let mut element = Matrix::<T>::zeros(d, d);
        for h in &hermitian {
            let w: f64 = rng.sample(StandardNormal);
            element = &element + &h.scale_real(T::lit(w));
        }
        let norm = element.frobenius_norm();
        if norm == T::zero() {
            continue;
        }
        let eig = hermitian_eigen(&element.scale_real(T::one() / norm))?;
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for k in 0..d {
            match clusters.last_mut() {
                Some(c) if (eig.values[k] - eig.values[*c.last().unwrap()]).as_f64() <= EIGEN_GAP => c.push(k),
                _ => clusters.push(vec![k]),
            }
        }
        let mut blocks = Vec::new();
        for c in &clusters {
            let mut p = Matrix::<T>::zeros(d, d);
            for &k in c {
                let v = eig.vector(k);
                p = &p + &(&v * &v.adjoint());
            }
            if alg.span.relative_residual(&p)?.as_f64() >= CONTAINS_TOL {
                continue;
            }
            let mut compressed = Subspace::empty(d, d);
            for b in alg.span.basis() {
                compressed.insert(&(&(&p * b) * &p))?;
            }
            let n = (compressed.dim() as f64).sqrt().round() as usize;
            let rank = p.trace().re.as_f64().round() as usize;
            if n == 0 || n * n != compressed.dim() || !rank.is_multiple_of(n) {
                blocks.clear();
                break;
            }
            blocks.push(CentralBlock { n, m: rank / n, projection: p });
        }
        let total: usize = blocks.iter().map(|b| b.n * b.n).sum();
        if blocks.len() == z.dim() && total == alg.dim() {
            blocks.sort_by_key(|b| std::cmp::Reverse((b.n, b.m)));
            return Ok(blocks);
        }
    }
    Err(Error::Degenerate(format!("central spectrum did not separate after {BLOCK_ATTEMPTS} attempts")))
}

/// `(n_k, m_k)` pairs of [`central_blocks`].
pub fn block_decomposition<T: Real>(alg: &Algebra<T>, seed: u64) -> Result<Vec<(usize, usize)>> {
    Ok(central_blocks(alg, seed)?.into_iter().map(|b| (b.n, b.m)).collect())
}

/// Haar-distributed `n x n` unitary: Gram-Schmidt on complex Gaussian columns.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    loop {
        let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            let mut v: Vec<C<T>> = (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C::new(T::lit(re), T::lit(im))
                })
                .collect();
            for _ in 0..2 {
                for q in &cols {
                    let proj: C<T> = q.iter().zip(&v).map(|(a, b)| a.conj() * b).fold(C::zero(), |s, x| s + x);
                    for (x, qi) in v.iter_mut().zip(q) {
                        *x -= proj * qi;
                    }
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).fold(T::zero(), |s, x| s + x).sqrt();
            if norm < T::floor_tol(1e-6) {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        if ok {
            return Matrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

/// `{sum_j u_ij A_j}` for the family padded with `pad` zero operators.
pub fn mix_kraus<T: Real>(map: &KrausMap<T>, u: &Matrix<T>, pad: usize) -> Result<KrausMap<T>> {
    let mut ops: Vec<Matrix<T>> = map.kraus().to_vec();
    let (r, c) = ops[0].shape();
    ops.extend((0..pad).map(|_| Matrix::zeros(r, c)));
    if u.shape() != (ops.len(), ops.len()) {
        return Err(Error::Dim(format!("mixing unitary must be {0}x{0}", ops.len())));
    }
    let mixed = (0..ops.len())
        .map(|i| {
            ops.iter().enumerate().fold(Matrix::zeros(r, c), |acc, (j, a)| &acc + &a.scale(u[(i, j)]))
        })
        .collect();
    KrausMap::from_parts_unchecked(map.in_dim(), map.out_dim(), mixed)
}

fn compare_algebras<T: Real>(name: &str, base: &Algebra<T>, other: &Algebra<T>, tol: f64) -> Result<Vec<Check>> {
    let residual = base.span.containment_residual(&other.span)?.max(other.span.containment_residual(&base.span)?);
    let mut dim = Check::flag(format!("{name}/dim"), base.dim() == other.dim());
    if base.dim() != other.dim() {
        dim = dim.with_detail(format!("{} vs {}", base.dim(), other.dim()));
    }
    Ok(vec![dim, Check::below(format!("{name}/containment"), residual.as_f64(), tol)])
}

/// The generated algebra does not depend on the Kraus representation.
///
/// Trial 0 pads every family with one zero operator and mixes with the
/// identity. Trial `t > 0` pads with `t % 2` zeros and mixes with a Haar
/// unitary drawn from stream `t` of a ChaCha generator seeded with `seed`.
pub fn kraus_choice_invariance<T: Real>(
    graph: &CausalGraph,
    channels: &BTreeMap<String, KrausMap<T>>,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Report> {
    let base = generate_algebra(graph, channels)?;
    let mut report = Report::new();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let mut mixed = BTreeMap::new();
        for (id, map) in channels {
            let pad = if t == 0 { 1 } else { t % 2 };
            let r = map.kraus().len() + pad;
            let u = if t == 0 { Matrix::identity(r) } else { haar_unitary(r, &mut rng) };
            mixed.insert(id.clone(), mix_kraus(map, &u, pad)?);
        }
        let other = generate_algebra(graph, &mixed)?;
        report.checks.extend(compare_algebras(&format!("invariance/trial[{t}]"), &base, &other, tol)?);
    }
    Ok(report)
}

/// Dimensions along the generator chain and the checks made on it.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub dims: Vec<usize>,
    pub report: Report,
}

/// Algebras of the projections plus the first `j` edges (in id order) are
/// nested, bounded by `D^2` and reached within `D^2` rounds.
pub fn af_filtration_check<T: Real>(
    graph: &CausalGraph,
    channels: &BTreeMap<String, KrausMap<T>>,
    tol: f64,
) -> Result<Filtration> {
    let d = graph.total_dim();
    let bound = (d * d) as f64;
    let ids: Vec<&String> = channels.keys().collect();
    let mut report = Report::new();
    let mut dims = Vec::new();
    let mut prev: Option<Algebra<T>> = None;
    for j in 0..=ids.len() {
        let prefix: BTreeMap<String, KrausMap<T>> =
            ids[..j].iter().map(|id| ((*id).clone(), channels[*id].clone())).collect();
        let alg = generate_algebra(graph, &prefix)?;
        let name = format!("af/step[{j}]");
        report.push(Check::at_most(format!("{name}/dim_bound"), alg.dim() as f64, bound));
        report.push(Check::at_most(format!("{name}/iterations"), alg.iterations as f64, bound));
        if let Some(p) = &prev {
            report.push(Check::below(format!("{name}/nested"), alg.span.containment_residual(&p.span)?.as_f64(), tol));
            report.push(Check::flag(format!("{name}/monotone"), alg.dim() >= p.dim()));
        }
        dims.push(alg.dim());
        prev = Some(alg);
    }
    Ok(Filtration { dims, report })
}
