use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use compact_pinv::corpus::{random_dense, worked_example};
use compact_pinv::lu::DEFAULT_EPS;
use compact_pinv::matio::{parse_matrix, write_matrix, AnyMatrix, DEFAULT_PRECISION};
use compact_pinv::oracle::mp_check;
use compact_pinv::{
    factor, pinv_apply, prepare_col_projector, prepare_row_projector, Complex64, Error, Matrix, PivotPolicy, Scalar,
};

#[derive(Parser)]
#[command(
    name = "compact-pinv",
    version,
    about = "In-place pseudoinverse products via rank-revealing LU"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor PA = LU and write the permutation, pivot columns, L and U.
    Factor(Io),
    /// Compute A+ B (B defaults to the identity).
    Pinv(Io),
    /// Compute A+ A B (B defaults to the identity).
    Colproj(Io),
    /// Compute A A+ B (B defaults to the identity).
    Rowproj(Io),
    /// Print the four Moore-Penrose residuals of X (given by --b) against A.
    Check(Io),
    /// Run the 5x7 worked example under every pivot policy.
    Demo(Opts),
    /// Time the three pivot policies on random dense matrices.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Pivot {
    Simple,
    Fine,
    Coarse,
}

#[derive(Args)]
struct Opts {
    /// Pivot acceptance policy.
    #[arg(long, value_enum, default_value = "simple")]
    pivot: Pivot,
    /// Threshold for the simple policy.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Decimal places in output; 17 or more writes exact scientific notation.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

#[derive(Args)]
struct Io {
    #[command(flatten)]
    opts: Opts,
    /// Matrix A.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Right-hand side B (for check: the candidate pseudoinverse X).
    #[arg(long, value_name = "FILE")]
    b: Option<PathBuf>,
    /// Output file; stdout when omitted. `factor` writes FILE.perm, FILE.L and FILE.U.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write projector results over B, visiting rows in descending order.
    #[arg(long)]
    inplace_expand: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    opts: Opts,
    /// Matrix order.
    #[arg(long, default_value_t = 120)]
    size: usize,
    /// Matrices per policy.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    /// Library error while reading the named file.
    File(String, Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::File(path, e) => write!(f, "{path}: {e}"),
            Failure::Io(msg) => f.write_str(msg),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn policy(o: &Opts) -> PivotPolicy {
    match o.pivot {
        Pivot::Simple => PivotPolicy::simple(o.eps),
        Pivot::Fine => PivotPolicy::fine(),
        Pivot::Coarse => PivotPolicy::coarse(),
    }
}

fn read(path: &Path) -> Run<AnyMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| Failure::File(path.display().to_string(), e))
}

fn emit(out: Option<&Path>, text: &str) -> Run<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn_rank_zero() {
    eprintln!("warning: {}; results are zero", Error::RankZero);
}

/// Both operands in one field, promoting to complex when either is complex.
enum Pair {
    Real(Matrix<f64>, Option<Matrix<f64>>),
    Complex(Matrix<Complex64>, Option<Matrix<Complex64>>),
}

fn load(io: &Io) -> Run<Pair> {
    let a = read(&io.input)?;
    let b = io.b.as_deref().map(read).transpose()?;
    let complex = a.is_complex() || b.as_ref().is_some_and(AnyMatrix::is_complex);
    Ok(match (a, b) {
        (AnyMatrix::Real(a), None) if !complex => Pair::Real(a, None),
        (AnyMatrix::Real(a), Some(AnyMatrix::Real(b))) => Pair::Real(a, Some(b)),
        (a, b) => Pair::Complex(a.to_complex(), b.map(|b| b.to_complex())),
    })
}

fn perm_text(rank: usize, rho: &[usize], gamma: &[usize]) -> String {
    let line = |name: &str, v: &[usize]| {
        std::iter::once(name.to_string())
            .chain(v.iter().map(ToString::to_string))
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!("rank {rank}\n{}\n{}\n", line("rho", rho), line("gamma", gamma))
}

fn run_factor<T: Scalar>(io: &Io, a: Matrix<T>) -> Run<()>
where
    AnyMatrix: From<Matrix<T>>,
{
    let f = factor(a, &policy(&io.opts))?;
    let perm = perm_text(f.rank(), f.permutation(), f.pivot_columns());
    if f.is_rank_zero() {
        warn_rank_zero();
    }
    let prec = io.opts.precision;
    let factors = (!f.is_rank_zero())
        .then(|| -> Run<_> {
            Ok((
                write_matrix(&f.extract_l()?.into(), prec),
                write_matrix(&f.extract_u()?.into(), prec),
            ))
        })
        .transpose()?;
    match &io.out {
        Some(base) => {
            let with = |ext: &str| {
                let mut s = base.as_os_str().to_owned();
                s.push(ext);
                PathBuf::from(s)
            };
            emit(Some(&with(".perm")), &perm)?;
            if let Some((l, u)) = factors {
                emit(Some(&with(".L")), &l)?;
                emit(Some(&with(".U")), &u)?;
            }
        }
        None => {
            let mut text = perm;
            if let Some((l, u)) = factors {
                let _ = write!(text, "L\n{l}U\n{u}");
            }
            emit(None, &text)?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Product {
    Pinv,
    Col,
    Row,
}

fn run_product<T: Scalar>(io: &Io, which: Product, a: Matrix<T>, b: Option<Matrix<T>>) -> Run<()>
where
    AnyMatrix: From<Matrix<T>>,
{
    let (m, n) = a.shape();
    let rows = match which {
        Product::Pinv | Product::Row => m,
        Product::Col => n,
    };
    let mut b = b.unwrap_or_else(|| Matrix::identity(rows));
    let f = factor(a, &policy(&io.opts))?;
    if f.is_rank_zero() {
        warn_rank_zero();
    }
    let p = b.cols();
    let g = match which {
        Product::Pinv => {
            let mut f = f;
            let mut g = Matrix::zeros(n, p);
            pinv_apply(&mut f, &mut b, &mut g)?;
            g
        }
        Product::Col | Product::Row => {
            let pp = match which {
                Product::Col => prepare_col_projector(f)?,
                _ => prepare_row_projector(f)?,
            };
            if io.inplace_expand {
                pp.apply_in_place(&mut b)?;
                b
            } else {
                let mut g = Matrix::zeros(pp.dim(), p);
                pp.apply(&mut b, &mut g)?;
                g
            }
        }
    };
    emit(io.out.as_deref(), &write_matrix(&g.into(), io.opts.precision))
}

fn residual_text(r: &[f64; 4]) -> String {
    format!(
        "|AXA-A|    {:.3e}\n|XAX-X|    {:.3e}\n|(AX)*-AX| {:.3e}\n|(XA)*-XA| {:.3e}\n",
        r[0], r[1], r[2], r[3]
    )
}

fn run_check<T: Scalar>(io: &Io, a: Matrix<T>, x: Option<Matrix<T>>) -> Run<()> {
    let x = x.ok_or_else(|| Failure::Io("check needs --b with the candidate pseudoinverse".into()))?;
    let rep = mp_check(&a, &x)?;
    emit(io.out.as_deref(), &residual_text(&rep.as_array()))
}

fn demo_residuals(p: &PivotPolicy) -> Run<(usize, Vec<usize>, f64, f64)> {
    let a = worked_example();
    let f = factor(a.clone(), p)?;
    let (r, rho) = (f.rank(), f.permutation().to_vec());
    let mut pf = f.clone();
    let mut x = Matrix::zeros(7, 5);
    pinv_apply(&mut pf, &mut Matrix::identity(5), &mut x)?;

    let row = prepare_row_projector(f.clone())?;
    let mut b = a.clone();
    row.apply_in_place(&mut b)?;
    let col = prepare_col_projector(f)?;
    let mut y = x.clone();
    col.apply_in_place(&mut y)?;
    Ok((r, rho, b.max_abs_diff(&a), y.max_abs_diff(&x)))
}

fn run_demo(o: &Opts) -> Run<()> {
    let mut out = String::new();
    let a = worked_example();
    let _ = writeln!(out, "A =\n{}", write_matrix(&a.clone().into(), o.precision));
    for p in [PivotPolicy::simple(o.eps), PivotPolicy::fine(), PivotPolicy::coarse()] {
        let (r, rho, e1, e2) = demo_residuals(&p)?;
        let _ = writeln!(
            out,
            "{:<6} r={r} rho={rho:?}  max|A-AA+A|={e1:.2e}  max|A+-A+AA+|={e2:.2e}",
            p.name()
        );
    }
    let f = factor(a, &policy(o))?;
    let mut g = Matrix::zeros(7, 5);
    let mut pf = f.clone();
    pinv_apply(&mut pf, &mut Matrix::identity(5), &mut g)?;
    let _ = write!(
        out,
        "\nL =\n{}\nU =\n{}\nA+ =\n{}",
        write_matrix(&f.extract_l()?.into(), o.precision),
        write_matrix(&f.extract_u()?.into(), o.precision),
        write_matrix(&g.into(), o.precision)
    );
    emit(None, &out)
}

fn run_bench(args: &BenchArgs) -> Run<()> {
    if args.size == 0 || args.reps == 0 {
        return Err(Error::Empty.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mats: Vec<Matrix<f64>> = (0..args.reps)
        .map(|_| random_dense(&mut rng, args.size, args.size))
        .collect();
    let mut times = Vec::new();
    for p in [
        PivotPolicy::simple(args.opts.eps),
        PivotPolicy::fine(),
        PivotPolicy::coarse(),
    ] {
        let t = Instant::now();
        for a in &mats {
            std::hint::black_box(factor(a.clone(), &p)?);
        }
        times.push((p.name(), t.elapsed().as_secs_f64()));
    }
    let base = times[0].1;
    println!("{} random {n}x{n} matrices", args.reps, n = args.size);
    for (name, t) in &times {
        println!("{name:<6} {:>9.3} ms  ratio {:.2}", t * 1e3, t / base);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Run<()> {
    let product = |io: &Io, which| match load(io)? {
        Pair::Real(a, b) => run_product(io, which, a, b),
        Pair::Complex(a, b) => run_product(io, which, a, b),
    };
    match &cli.command {
        Command::Factor(io) => match read(&io.input)? {
            AnyMatrix::Real(a) => run_factor(io, a),
            AnyMatrix::Complex(a) => run_factor(io, a),
        },
        Command::Pinv(io) => product(io, Product::Pinv),
        Command::Colproj(io) => product(io, Product::Col),
        Command::Rowproj(io) => product(io, Product::Row),
        Command::Check(io) => match load(io)? {
            Pair::Real(a, x) => run_check(io, a, x),
            Pair::Complex(a, x) => run_check(io, a, x),
        },
        Command::Demo(o) => run_demo(o),
        Command::Bench(b) => run_bench(b),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                Failure::Lib(err) | Failure::File(_, err) => err.exit_code(),
                Failure::Io(_) => 1,
            };
            ExitCode::from(code as u8)
        }
    }
}
