use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nabla_kit::cells::{classify_cell, enumerate_cells_with_budget, Cell, Flavor, DEFAULT_MAX_M, DEFAULT_MAX_N};
use nabla_kit::collapse::{
    collapse_hat_with_budget, collapse_q_with_budget, filter_to_subcomplex, validate_sequence, CollapseSequence, Face,
    FaceComplex,
};
use nabla_kit::homology::homology;
use nabla_kit::poset::barycentric_with_budget;
use nabla_kit::resolution::{bary_map_between, lift_between, resolve_with_budget, Resolution};
use nabla_kit::text::{
    certificate_header, complex_digest, parse_certificate, parse_complex, parse_family, parse_map_text, parse_tower,
    sha256_hex, write_certificate, write_complex, write_map, write_tower, Listing,
};
use nabla_kit::towers::{
    check_family, example_tower, is_dimension_increasing, resolve_tower_with_budget, skeleton_tower, surjectivize,
    trace_simplex, ExampleParams, SubcomplexFamily, Tower,
};
use nabla_kit::{Budget, Error, Simplex, SimplicialComplex, SimplicialMap};

use crate::report::InputDigest;
use crate::{write_atomic, CliError, CliResult, CollapseArgs, Command, Ctx, TowerCommand, Verdict};

impl Ctx<'_> {
    fn read_text(&mut self, path: &Path) -> CliResult<String> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.report.inputs.push(InputDigest { path: path.display().to_string(), sha256: sha256_hex(text.as_bytes()) });
        Ok(text)
    }

    fn read_complex(&mut self, path: &Path) -> CliResult<SimplicialComplex> {
        let text = self.read_text(path)?;
        parse_complex(&text).map_err(|e| in_file(path, e))
    }

    fn read_map(&mut self, path: &Path) -> CliResult<SimplicialMap> {
        let mt = parse_map_text(&self.read_text(path)?).map_err(|e| in_file(path, e))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        let source = Arc::new(self.read_complex(&dir.join(&mt.source))?);
        let target = Arc::new(self.read_complex(&dir.join(&mt.target))?);
        SimplicialMap::new(source, target, mt.assignment).map_err(|e| in_file(path, e))
    }

    fn read_tower(&mut self, path: &Path) -> CliResult<Tower> {
        let text = self.read_text(path)?;
        parse_tower(&text).map_err(|e| in_file(path, e))
    }

    fn write_file(&mut self, path: &Path, contents: &str) -> CliResult<()> {
        write_atomic(path, contents)?;
        self.report.outputs.push(path.display().to_string());
        Ok(())
    }

    /// Writes to `path` when given, otherwise to stdout.
    fn emit(&mut self, path: Option<&PathBuf>, contents: &str) -> CliResult<()> {
        match path {
            Some(p) => self.write_file(p, contents),
            None => Ok(self.out.write_all(contents.as_bytes())?),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) -> CliResult<()> {
        writeln!(self.out, "{}", s.as_ref())?;
        Ok(())
    }

    fn verdict(&mut self, passed: bool, detail: String) -> CliResult<Verdict> {
        let v = format!("{} {detail}", if passed { "PASS" } else { "FAIL" });
        self.line(&v)?;
        self.report.verdicts.push(v);
        Ok(if passed { Verdict::Pass } else { Verdict::Fail })
    }
}

/// Whole cell complexes beyond the default range need an explicit `--budget-cells`.
fn check_cell_range(ctx: &Ctx, m: usize, n: u32) -> CliResult<()> {
    if ctx.budget.max_items.is_none() && (m > DEFAULT_MAX_M || n > DEFAULT_MAX_N) {
        return Err(CliError::Core(Error::Parameter(format!(
            "m = {m}, n = {n} is outside m <= {DEFAULT_MAX_M}, n <= {DEFAULT_MAX_N}; pass --budget-cells to go further"
        ))));
    }
    Ok(())
}

fn in_file(path: &Path, e: Error) -> CliError {
    match e {
        Error::Input(m) => CliError::Core(Error::Input(format!("{}: {m}", path.display()))),
        other => CliError::Core(other),
    }
}

pub(crate) fn dispatch(cmd: &Command, ctx: &mut Ctx) -> CliResult<Verdict> {
    match cmd {
        Command::Build { file, output, maximal } => {
            let k = ctx.read_complex(file)?;
            ctx.report.count("simplexes", k.len());
            let listing = if *maximal { Listing::Maximal } else { Listing::All };
            ctx.emit(output.as_ref(), &write_complex(&k, listing))?;
            if output.is_some() {
                ctx.line(format!("dim {} f-vector {:?} digest {}", k.dim(), k.f_vector(), complex_digest(&k)))?;
            }
            Ok(Verdict::Done)
        }
        Command::Bary { file, output, labels } => {
            let k = ctx.read_complex(file)?;
            let b = barycentric_with_budget(&k, &ctx.budget)?;
            ctx.report.count("simplexes", b.complex.len());
            let mut table = String::from("# vertex labels of the subdivision\n");
            for v in b.complex.vertices() {
                let _ = writeln!(table, "vertex {v} = {}", b.label(v));
            }
            ctx.emit(output.as_ref(), &write_complex(&b.complex, Listing::All))?;
            if let Some(p) = labels {
                ctx.write_file(p, &table)?;
            }
            if output.is_some() {
                ctx.line(format!("bary: dim {} f-vector {:?}", b.complex.dim(), b.complex.f_vector()))?;
            }
            Ok(Verdict::Done)
        }
        Command::Resolve { file, n, out, boxtimes } => resolve_cmd(ctx, file, *n, out, *boxtimes),
        Command::Lift { map, n, out } => lift_cmd(ctx, map, *n, out),
        Command::Grayson { m, n, flavor } => {
            check_cell_range(ctx, *m, *n)?;
            let text = render_grayson(*m, *n, *flavor, &ctx.budget)?;
            ctx.out.write_all(text.as_bytes())?;
            Ok(Verdict::Done)
        }
        Command::Collapse(args) => collapse_cmd(ctx, args),
        Command::VerifyCollapse { cert, complex, rel_subcomplex, restrict } => {
            verify_cmd(ctx, cert, complex.as_deref(), rel_subcomplex.as_deref(), restrict.as_deref())
        }
        Command::Homology { file } => {
            let k = ctx.read_complex(file)?;
            ctx.budget.check(k.len(), "homology")?;
            ctx.report.count("simplexes", k.len());
            let h = homology(&k);
            ctx.out.write_all(h.to_string().as_bytes())?;
            Ok(Verdict::Done)
        }
        Command::Tower { cmd } => tower_cmd(ctx, cmd),
        Command::Selftest => {
            let results = crate::acceptance::run_all(ctx.out)?;
            for r in &results {
                ctx.report.verdicts.push(r.line());
            }
            Ok(if results.iter().all(|r| r.passed) { Verdict::Pass } else { Verdict::Fail })
        }
    }
}

fn fmt_dims(d: &[usize]) -> String {
    let parts: Vec<String> = d.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Cells of `R(m,n)` or `Q(m,n)` by dimension, then the top cells.
pub fn render_grayson(m: usize, n: u32, flavor: Flavor, budget: &Budget) -> nabla_kit::Result<String> {
    let cx = enumerate_cells_with_budget(m, n, flavor, budget)?;
    let name = match flavor {
        Flavor::R => "R",
        Flavor::Q => "Q",
    };
    let mut s = String::new();
    let _ = writeln!(s, "# {name}(m={m},n={n}): {} cells, by dimension {:?}", cx.cells.len(), cx.count_by_dim());
    for d in 0..=cx.dim().max(0) as usize {
        let _ = writeln!(s, "dim {d}:");
        for c in cx.cells_of_dim(d) {
            let class = match classify_cell(c) {
                Ok(cl) => format!(
                    "lambda={} kind={} partner={}",
                    cl.lambda,
                    cl.kind,
                    cl.partner.map_or("-".to_string(), |p| p.to_string())
                ),
                Err(_) => "lambda=- kind=- partner=-".to_string(),
            };
            let _ = writeln!(s, "  {c} factors={} {class}", fmt_dims(&c.factor_dims()));
        }
    }
    let top = cx.top_cells();
    let _ = writeln!(s, "top cells: {} of dimension {}", top.len(), cx.dim());
    for c in top {
        let _ = writeln!(s, "  {c} factors={}", fmt_dims(&c.factor_dims()));
    }
    Ok(s)
}

fn labels_table(res: &Resolution) -> String {
    let mut s = String::from("# vertex labels of the resolution: (base simplex @ level)\n");
    for v in res.hat().vertices() {
        let _ = writeln!(s, "vertex {v} = {}", res.vertex_label(v));
    }
    s
}

fn resolve_cmd(ctx: &mut Ctx, file: &Path, n: u32, out: &Path, with_boxtimes: bool) -> CliResult<Verdict> {
    let k = ctx.read_complex(file)?;
    let res = resolve_with_budget(&k, n, &ctx.budget)?;
    let bary = &res.bary().complex;
    let image = res.embed_image();
    let mut files = vec![
        ("base.cplx", write_complex(&k, Listing::All)),
        ("bary.cplx", write_complex(bary, Listing::All)),
        ("hat.cplx", write_complex(res.hat(), Listing::All)),
        ("embed.map", write_map(res.embed(), "bary.cplx", "hat.cplx")),
        ("project.map", write_map(res.project(), "hat.cplx", "bary.cplx")),
        ("labels.txt", labels_table(&res)),
    ];
    if with_boxtimes {
        ctx.budget.check_time("boxtimes")?;
        files.push(("boxtimes.cplx", write_complex(res.boxtimes(), Listing::All)));
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    for (name, body) in &files {
        ctx.write_file(&out.join(name), body)?;
    }
    ctx.report.count("simplexes", res.hat().len());
    ctx.line(format!("K: dim {} f-vector {:?}", k.dim(), k.f_vector()))?;
    ctx.line(format!("bary: f-vector {:?}", bary.f_vector()))?;
    ctx.line(format!("hat(n={n}): f-vector {:?}", res.hat().f_vector()))?;
    ctx.line(format!("embed image: f-vector {:?}", image.f_vector()))?;
    Ok(Verdict::Done)
}

fn lift_cmd(ctx: &mut Ctx, map: &Path, n: u32, out: &Path) -> CliResult<Verdict> {
    let f = ctx.read_map(map)?;
    if f.source().dim() > n as isize || f.target().dim() > n as isize {
        return Err(Error::Parameter(format!("lift needs dim source and dim target at most n = {n}")).into());
    }
    let src = resolve_with_budget(f.source(), n, &ctx.budget)?;
    let tgt = resolve_with_budget(f.target(), n, &ctx.budget)?;
    let lifted = lift_between(&f, &src, &tgt)?;
    let square = tgt.project().after(&lifted)? == bary_map_between(&f, &src, &tgt).after(src.project())?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    ctx.write_file(&out.join("source-hat.cplx"), &write_complex(src.hat(), Listing::All))?;
    ctx.write_file(&out.join("target-hat.cplx"), &write_complex(tgt.hat(), Listing::All))?;
    ctx.write_file(&out.join("lift.map"), &write_map(&lifted, "source-hat.cplx", "target-hat.cplx"))?;
    ctx.report.count("simplexes", src.hat().len() + tgt.hat().len());
    let yes = |b: bool| if b { "yes" } else { "no" };
    ctx.line(format!("map: nondegenerate {}", yes(f.is_nondegenerate())))?;
    ctx.line(format!("lift: nondegenerate {}", yes(lifted.is_nondegenerate())))?;
    ctx.line(format!("square p∘lift = f♭∘p: {}", yes(square)))?;
    Ok(if lifted.is_nondegenerate() && square { Verdict::Done } else { Verdict::Fail })
}

fn collapse_cmd(ctx: &mut Ctx, a: &CollapseArgs) -> CliResult<Verdict> {
    let text = match &a.complex {
        None => {
            let Some(m) = a.m else {
                return Err(CliError::Usage("collapse needs --m or a complex file".into()));
            };
            if a.rel_subcomplex.is_some() || a.restrict.is_some() {
                return Err(CliError::Usage("--rel-subcomplex and --restrict need a complex file".into()));
            }
            check_cell_range(ctx, m, a.n)?;
            let floor = a.relative_floor.unwrap_or(m as u32);
            let seq = collapse_q_with_budget(m, a.n, floor, &ctx.budget)?;
            ctx.report.count("steps", seq.len());
            write_certificate(&seq)
        }
        Some(path) => {
            if a.m.is_some() || a.relative_floor.is_some() {
                return Err(CliError::Usage("--m and --relative-floor apply to Q(m,n) only".into()));
            }
            let k = ctx.read_complex(path)?;
            let rel = a.rel_subcomplex.as_deref().map(|p| ctx.read_complex(p)).transpose()?;
            let hc = collapse_hat_with_budget(&k, a.n, rel.as_ref(), &ctx.budget)?;
            let seq = match a.restrict.as_deref() {
                Some(p) => {
                    let l = ctx.read_complex(p)?;
                    filter_to_subcomplex(&hc.resolution, &hc.sequence, &l)?
                }
                None => hc.sequence,
            };
            ctx.report.count("simplexes", hc.resolution.hat().len());
            ctx.report.count("steps", seq.len());
            write_certificate(&seq)
        }
    };
    ctx.emit(a.output.as_ref(), &text)?;
    if a.output.is_some() {
        let (start, finish) = certificate_header(&text)?;
        let steps = ctx.report.counters["steps"];
        ctx.line(format!("certificate: {steps} steps, start {start}, finish {finish}"))?;
    }
    Ok(Verdict::Done)
}

fn parse_usize_pair(s: &str) -> Option<(usize, u32)> {
    let inner = s.strip_prefix("Q(")?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// `hat(n=N,K=D)` → `(N, D)`.
fn parse_hat(s: &str) -> Option<(u32, &str)> {
    let inner = s.strip_prefix("hat(n=")?.strip_suffix(')')?;
    let (n, k) = inner.split_once(",K=")?;
    Some((n.parse().ok()?, k))
}

fn bad_descriptor(what: &str) -> CliError {
    CliError::Core(Error::Input(format!("unrecognized certificate descriptor `{what}`")))
}

fn verify_cmd(
    ctx: &mut Ctx,
    cert: &Path,
    complex: Option<&Path>,
    rel: Option<&Path>,
    restrict: Option<&Path>,
) -> CliResult<Verdict> {
    let text = ctx.read_text(cert)?;
    let (start, finish) = certificate_header(&text).map_err(|e| in_file(cert, e))?;
    if start.starts_with("Q(") {
        let (m, n) = parse_usize_pair(&start).ok_or_else(|| bad_descriptor(&start))?;
        check_cell_range(ctx, m, n)?;
        let cells = enumerate_cells_with_budget(m, n, Flavor::Q, &ctx.budget)?;
        let expected: Vec<Cell> = match parse_usize_pair(&finish) {
            Some((m2, f)) if m2 == m => enumerate_cells_with_budget(m, f, Flavor::Q, &ctx.budget)?.cells,
            Some(_) => return Err(bad_descriptor(&finish)),
            None => {
                let c: Cell = finish.parse().map_err(|_| bad_descriptor(&finish))?;
                let mut all = c.faces();
                all.push(c);
                all
            }
        };
        let seq = parse_certificate::<Cell>(&text).map_err(|e| in_file(cert, e))?;
        let fc = FaceComplex::from_cells(&cells);
        return replay(ctx, &fc, &seq, &expected);
    }

    let (start_main, l_start) = split_restrict(&start);
    let (finish_main, l_finish) = split_restrict(&finish);
    if l_start != l_finish {
        return Err(bad_descriptor(&finish));
    }
    let (n, kd) = parse_hat(start_main).ok_or_else(|| bad_descriptor(&start))?;
    let Some(kpath) = complex else {
        return Err(CliError::Usage("this certificate needs --complex".into()));
    };
    let k = ctx.read_complex(kpath)?;
    check_digest(&k, kd, kpath)?;
    let res = resolve_with_budget(&k, n, &ctx.budget)?;
    let embed = format!("embed(K={kd})");
    let mut target = if finish_main == embed {
        res.embed_image()
    } else {
        let (lower, e) = finish_main.split_once('+').ok_or_else(|| bad_descriptor(&finish))?;
        let (n1, md) = parse_hat(lower).ok_or_else(|| bad_descriptor(&finish))?;
        if e != embed || n1 + 1 != n {
            return Err(bad_descriptor(&finish));
        }
        let Some(mpath) = rel else {
            return Err(CliError::Usage("this certificate needs --rel-subcomplex".into()));
        };
        let mm = ctx.read_complex(mpath)?;
        check_digest(&mm, md, mpath)?;
        res.over_subcomplex(&mm, n1)?.union(&res.embed_image())
    };
    let start_cx = match l_start {
        None => res.hat().as_ref().clone(),
        Some(ld) => {
            let Some(lpath) = restrict else {
                return Err(CliError::Usage("this certificate needs --restrict".into()));
            };
            let l = ctx.read_complex(lpath)?;
            check_digest(&l, ld, lpath)?;
            let over = res.over_subcomplex(&l, n)?;
            target = target.filter(|s| over.contains(s));
            over
        }
    };
    let seq = parse_certificate::<Simplex>(&text).map_err(|e| in_file(cert, e))?;
    let fc = FaceComplex::from_simplicial(&start_cx);
    replay(ctx, &fc, &seq, target.simplexes())
}

fn split_restrict(s: &str) -> (&str, Option<&str>) {
    match s.split_once("|L=") {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    }
}

fn check_digest(k: &SimplicialComplex, expected: &str, path: &Path) -> CliResult<()> {
    let d = complex_digest(k);
    if d != expected {
        return Err(CliError::Core(Error::Input(format!(
            "{}: digest {d} does not match the certificate's {expected}",
            path.display()
        ))));
    }
    Ok(())
}

fn replay<T: Face>(
    ctx: &mut Ctx,
    fc: &FaceComplex<T>,
    seq: &CollapseSequence<T>,
    expected: &[T],
) -> CliResult<Verdict> {
    ctx.budget.check(fc.len(), "verify-collapse")?;
    let rep = validate_sequence(fc, seq)?;
    ctx.report.count("cells", fc.len());
    ctx.report.count("steps", rep.steps_applied);
    if let Some(f) = &rep.failure {
        return ctx.verdict(false, format!("step {}: {}", f.step, f.reason));
    }
    if let Some(i) = rep.euler_trace.windows(2).position(|w| w[0] != w[1]) {
        return ctx.verdict(false, format!("step {i}: Euler characteristic changed"));
    }
    if !rep.finishes_at(expected) {
        let mut exp = expected.to_vec();
        exp.sort();
        let extra = rep.remaining.iter().find(|c| exp.binary_search(c).is_err());
        let missing = exp.iter().find(|c| rep.remaining.binary_search(c).is_err());
        let detail = match (extra, missing) {
            (Some(c), _) => format!("finish: {c} remains but is not in {}", seq.finish),
            (None, Some(c)) => format!("finish: {c} of {} was removed", seq.finish),
            (None, None) => format!("finish differs from {}", seq.finish),
        };
        return ctx.verdict(false, detail);
    }
    let chi = rep.euler_trace[0];
    ctx.verdict(
        true,
        format!(
            "{} steps, finish {} ({} cells), Euler characteristic {chi}",
            rep.steps_applied,
            seq.finish,
            expected.len()
        ),
    )
}

fn parse_simplex_arg(s: &str) -> CliResult<Simplex> {
    let t = s.trim();
    let braced = if t.starts_with('{') { t.to_string() } else { format!("{{{t}}}") };
    braced.parse().map_err(CliError::Core)
}

fn tower_summary(t: &Tower) -> String {
    let dims: Vec<isize> = t.levels().iter().map(|k| k.dim()).collect();
    format!("tower: {} levels, dims {:?}, degenerate bonds {:?}", t.len(), dims, t.degenerate_bonds())
}

fn emit_tower(ctx: &mut Ctx, t: &Tower, output: Option<&PathBuf>) -> CliResult<Verdict> {
    ctx.report.count("simplexes", t.levels().iter().map(|k| k.len()).sum());
    ctx.emit(output, &write_tower(t))?;
    if output.is_some() {
        ctx.line(tower_summary(t))?;
    }
    Ok(Verdict::Done)
}

fn tower_cmd(ctx: &mut Ctx, cmd: &TowerCommand) -> CliResult<Verdict> {
    match cmd {
        TowerCommand::Example { name, size, prime, sphere_dim, cycle, output } => {
            let params = ExampleParams { sphere_dim: *sphere_dim, prime: *prime, cycle: *cycle };
            let t = example_tower(*name, *size, params)?;
            emit_tower(ctx, &t, output.as_ref())
        }
        TowerCommand::Check { tower, mode, family, skeleta } => {
            let t = ctx.read_tower(tower)?;
            let fam = match (family, skeleta) {
                (Some(p), _) => {
                    let text = ctx.read_text(p)?;
                    parse_family(&text).map_err(|e| in_file(p, e))?
                }
                (None, Some(d)) => SubcomplexFamily::skeleta(&t, *d),
                (None, None) => return Err(CliError::Usage("check needs --family or --skeleta".into())),
            };
            let c = check_family(&t, &fam, *mode)?;
            match c.failure {
                None => ctx.verdict(true, format!("{mode} family over {} levels", t.len())),
                Some((level, s)) => ctx.verdict(false, format!("{mode}: level {level} simplex {s}")),
            }
        }
        TowerCommand::Resolve { tower, n, output } => {
            let t = ctx.read_tower(tower)?;
            let r = resolve_tower_with_budget(&t, *n, &ctx.budget)?;
            emit_tower(ctx, &r.tower, output.as_ref())
        }
        TowerCommand::Skeleton { tower, n, output } => {
            let t = ctx.read_tower(tower)?;
            emit_tower(ctx, &skeleton_tower(&t, *n), output.as_ref())
        }
        TowerCommand::Surjectivize { tower, output } => {
            let t = ctx.read_tower(tower)?;
            emit_tower(ctx, &surjectivize(&t), output.as_ref())
        }
        TowerCommand::Trace { tower, level, simplex } => {
            let t = ctx.read_tower(tower)?;
            let s = parse_simplex_arg(simplex)?;
            let mut chain = vec![s.clone()];
            chain.extend(trace_simplex(&t, *level, &s)?);
            for (i, c) in chain.iter().enumerate() {
                ctx.line(format!("level {}: {c}", level - i))?;
            }
            let inc = if is_dimension_increasing(&chain) { "yes" } else { "no" };
            ctx.line(format!("dimension-increasing: {inc}"))?;
            Ok(Verdict::Done)
        }
    }
}
