//! Subcommand dispatch. Exit codes are a stable contract:
//! 0 pass, 1 usage/parse, 2 nonexistence, 3 verification fail,
//! 4 recovery fail.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use rankone::error::Error as CoreError;
use rankone::forms::{
    assemble_phi, bipartite_catalog, AssembleOptions, PreserverMap, PsiP, PsiR, PsiT,
};
use rankone::recover::{recover, RecoverOptions};
use rankone::subspaces::{
    ces_construct, ces_max_dim, contains_decomposable, exists_for_product_dims, kernel_basis,
    synthesize_kernel_clear, SearchOptions,
};
use rankone::verify::{is_rank_one_preserver, VerifyOptions};
use rankone::DimsProfile;

use crate::bundle::{
    format_partition, parse_dims_arg, parse_partition_arg, partition_to_arrays, read_matrix_file,
    MapBundle, MatrixFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NONEXISTENT: i32 = 2;
pub const EXIT_VERIFY_FAIL: i32 = 3;
pub const EXIT_RECOVER_FAIL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "rankone",
    version,
    about = "Construct, verify, and structurally decompose linear maps that send rank-one tensor products to rank-one matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a map bundle for a partition: synthesize valid factor
    /// matrices and assemble the vec-action matrix.
    Gen {
        /// Factor dimensions, e.g. "2,3"
        #[arg(long)]
        dims: String,
        /// Partition "P₁|P₂|P₃|P₄" as four |-separated comma lists of
        /// 1-based indices, e.g. "1|2||"
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output bundle path
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify that a bundle's map preserves rank-one tensor products.
    Verify {
        bundle: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also recover the structure and require exact reassembly
        #[arg(long)]
        strict: bool,
    },
    /// Recover partition and factor matrices from a bundle holding phi.
    Recover {
        bundle: PathBuf,
        /// Output bundle path (stdout JSON when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Construct a maximal completely entangled subspace of ℂ^p ⊗ ℂ^q.
    Ces {
        p: usize,
        q: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the basis as a MatrixFile (columns are basis vectors)
        #[arg(long)]
        json: bool,
    },
    /// Check whether a matrix kernel contains a decomposable vector.
    KernelCheck {
        matrix: PathBuf,
        /// Product-space factor dimensions, e.g. "3,3"
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the 16 bipartite composite forms for M_{n₁n₂}.
    Catalog {
        n1: usize,
        n2: usize,
        #[arg(long)]
        json: bool,
    },
}

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn core_failure(err: CoreError) -> Failure {
    let code = match &err {
        CoreError::Nonexistent(_) | CoreError::SynthesisFailed { .. } => EXIT_NONEXISTENT,
        CoreError::NotKronecker { .. } | CoreError::AmbiguousStructure(_) => EXIT_RECOVER_FAIL,
        _ => EXIT_USAGE,
    };
    Failure {
        code,
        message: err.to_string(),
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen {
            dims,
            partition,
            seed,
            out,
        } => cmd_gen(&dims, &partition, seed, &out),
        Command::Verify {
            bundle,
            trials,
            seed,
            strict,
        } => cmd_verify(&bundle, trials, seed, strict),
        Command::Recover { bundle, out, seed } => cmd_recover(&bundle, out.as_deref(), seed),
        Command::Ces { p, q, seed, json } => cmd_ces(p, q, seed, json),
        Command::KernelCheck { matrix, dims, seed } => cmd_kernel_check(&matrix, &dims, seed),
        Command::Catalog { n1, n2, json } => cmd_catalog(n1, n2, json),
    }
}

fn parse_dims_profile(arg: &str) -> Result<DimsProfile, Failure> {
    let factors = parse_dims_arg(arg).map_err(Failure::usage)?;
    DimsProfile::new(factors).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_gen(
    dims_arg: &str,
    partition_arg: &str,
    seed: u64,
    out: &std::path::Path,
) -> Result<(), Failure> {
    let dims = parse_dims_profile(dims_arg)?;
    let partition = parse_partition_arg(partition_arg, dims.k()).map_err(Failure::usage)?;

    let m = dims.m();
    let u_dims = partition.u_factor_dims(&dims);
    let v_dims = partition.v_factor_dims(&dims);
    if !exists_for_product_dims(m, &u_dims) || !exists_for_product_dims(m, &v_dims) {
        return Err(Failure {
            code: EXIT_NONEXISTENT,
            message:
                "no valid factor matrices exist: k = 2, 2 ∈ {n₁,n₂}, and P₃ = K or P₄ = K".into(),
        });
    }

    let search = SearchOptions::with_seed(seed);
    let m_factor =
        synthesize_kernel_clear(m, &u_dims, seed, &search).map_err(core_failure)?;
    let n_factor = synthesize_kernel_clear(m, &v_dims, seed.wrapping_add(0x9E37_79B9), &search)
        .map_err(core_failure)?;

    let map = assemble_phi(&dims, &partition, &m_factor, &n_factor, &AssembleOptions::default())
        .map_err(core_failure)?;

    let bundle = MapBundle {
        dims: dims.factors().to_vec(),
        m: Some(MatrixFile::from_matrix(&m_factor)),
        n: Some(MatrixFile::from_matrix(&n_factor)),
        partition: Some(partition_to_arrays(&partition)),
        phi: Some(MatrixFile::from_matrix(map.phi())),
    };
    bundle.write(out).map_err(Failure::usage)?;
    println!(
        "generated map for dims {:?}, partition {}: M {}x{}, N {}x{} -> {}",
        dims.factors(),
        format_partition(&partition),
        m_factor.rows(),
        m_factor.cols(),
        n_factor.rows(),
        n_factor.cols(),
        out.display()
    );
    Ok(())
}

/// Builds the map from a bundle: prefer the stored phi, otherwise assemble
/// from partition and factors (leniently — verification judges validity).
fn map_from_bundle(bundle: &MapBundle) -> Result<PreserverMap, Failure> {
    let dims = bundle.dims_profile().map_err(Failure::usage)?;
    if let Some(phi) = &bundle.phi {
        let phi = phi.to_matrix().map_err(Failure::usage)?;
        return PreserverMap::from_phi(dims, phi).map_err(|e| Failure::usage(e.to_string()));
    }
    let (Some(mf), Some(nf), Some(p)) = (
        &bundle.m,
        &bundle.n,
        bundle.partition_value().map_err(Failure::usage)?,
    ) else {
        return Err(Failure::usage(
            "bundle needs either phi or partition with M and N",
        ));
    };
    let m = mf.to_matrix().map_err(Failure::usage)?;
    let n = nf.to_matrix().map_err(Failure::usage)?;
    assemble_phi(&dims, &p, &m, &n, &AssembleOptions::lenient())
        .map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_verify(
    bundle_path: &std::path::Path,
    trials: usize,
    seed: u64,
    strict: bool,
) -> Result<(), Failure> {
    let bundle = MapBundle::read(bundle_path).map_err(Failure::usage)?;
    let map = map_from_bundle(&bundle)?;

    let opts = VerifyOptions {
        trials,
        seed,
        ..Default::default()
    };
    let report = is_rank_one_preserver(&map, &opts).map_err(core_failure)?;
    println!(
        "verdict: {:?} ({} random trials + deterministic sweep, max σ₂/σ₁ = {:.3e})",
        report.verdict, report.trials, report.max_second_singular
    );
    if let Some(ce) = &report.counterexample {
        println!("counterexample (input, output rank {}):", ce.output_rank);
        println!(
            "{}",
            MatrixFile::from_matrix(&ce.product.realize()).canonical_json()
        );
        return Err(Failure {
            code: EXIT_VERIFY_FAIL,
            message: "map is not a rank-one preserver".into(),
        });
    }
    if strict {
        let rec = recover(&map, &RecoverOptions {
            seed,
            ..Default::default()
        })
        .map_err(|e| Failure {
            code: EXIT_VERIFY_FAIL,
            message: format!("strict check failed: {e}"),
        })?;
        println!(
            "strict: partition {} recovered, reassembly residual = {:.3e}",
            format_partition(&rec.partition),
            rec.residual
        );
        if rec.residual >= 1e-8 {
            return Err(Failure {
                code: EXIT_VERIFY_FAIL,
                message: format!("strict reassembly residual {:.3e} ≥ 1e-8", rec.residual),
            });
        }
    }
    Ok(())
}

fn cmd_recover(
    bundle_path: &std::path::Path,
    out: Option<&std::path::Path>,
    seed: u64,
) -> Result<(), Failure> {
    let bundle = MapBundle::read(bundle_path).map_err(Failure::usage)?;
    let dims = bundle.dims_profile().map_err(Failure::usage)?;
    let Some(phi_file) = &bundle.phi else {
        return Err(Failure::usage("recover needs a bundle with phi"));
    };
    let phi = phi_file.to_matrix().map_err(Failure::usage)?;
    let map = PreserverMap::from_phi(dims.clone(), phi).map_err(|e| Failure::usage(e.to_string()))?;

    let rec = recover(&map, &RecoverOptions {
        seed,
        ..Default::default()
    })
    .map_err(core_failure)?;
    if rec.residual >= 1e-8 {
        return Err(Failure {
            code: EXIT_RECOVER_FAIL,
            message: format!("reassembly residual {:.3e} ≥ 1e-8", rec.residual),
        });
    }

    eprintln!(
        "partition: {} (residual {:.3e}; gauge: {})",
        format_partition(&rec.partition),
        rec.residual,
        rec.scalar_note
    );
    let out_bundle = MapBundle {
        dims: dims.factors().to_vec(),
        m: Some(MatrixFile::from_matrix(&rec.m)),
        n: Some(MatrixFile::from_matrix(&rec.n)),
        partition: Some(partition_to_arrays(&rec.partition)),
        phi: bundle.phi.clone(),
    };
    match out {
        Some(path) => {
            out_bundle.write(path).map_err(Failure::usage)?;
            println!("recovered bundle written to {}", path.display());
        }
        None => print!("{}", out_bundle.canonical_json()),
    }
    Ok(())
}

fn cmd_ces(p: usize, q: usize, seed: u64, json: bool) -> Result<(), Failure> {
    let s = ces_construct(p, q).map_err(|e| Failure::usage(e.to_string()))?;
    let report = contains_decomposable(&s, &[p, q], &SearchOptions::with_seed(seed))
        .map_err(core_failure)?;
    if json {
        println!("{}", MatrixFile::from_matrix(&s.basis_matrix()).canonical_json());
    } else {
        println!(
            "completely entangled subspace of ℂ^{p} ⊗ ℂ^{q}: dim {} (max {})",
            s.dim(),
            ces_max_dim(&[p, q])
        );
        for (i, v) in s.basis().iter().enumerate() {
            let entries: Vec<String> = v
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            println!("  b{}: [{}]", i + 1, entries.join(", "));
        }
        println!(
            "checker: {:?} (min value {:.3e}, {} starts)",
            report.verdict, report.min_value, report.starts
        );
    }
    Ok(())
}

fn cmd_kernel_check(
    matrix_path: &std::path::Path,
    dims_arg: &str,
    seed: u64,
) -> Result<(), Failure> {
    let dims = parse_dims_arg(dims_arg).map_err(Failure::usage)?;
    let mf = read_matrix_file(matrix_path).map_err(Failure::usage)?;
    let m = mf.to_matrix().map_err(Failure::usage)?;
    let total: usize = dims.iter().product();
    if m.cols() != total {
        return Err(Failure::usage(format!(
            "matrix has {} columns but dims {:?} multiply to {total}",
            m.cols(),
            dims
        )));
    }
    let kernel = kernel_basis(&m, None).map_err(core_failure)?;
    println!("kernel dimension: {}", kernel.dim());
    let report = contains_decomposable(&kernel, &dims, &SearchOptions::with_seed(seed))
        .map_err(core_failure)?;
    println!(
        "verdict: {:?} (min value {:.3e}, {} starts, {} sweeps)",
        report.verdict, report.min_value, report.starts, report.iterations
    );
    if let Some(witness) = &report.witness {
        println!("witness factors:");
        for (i, f) in witness.iter().enumerate() {
            let entries: Vec<String> = f
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            println!("  v{}: [{}]", i + 1, entries.join(", "));
        }
    }
    Ok(())
}

fn psi_p_label(p: PsiP) -> &'static str {
    match p {
        PsiP::Id => "id",
        PsiP::Pt1 => "PT1",
        PsiP::Pt2 => "PT2",
    }
}

fn psi_r_label(r: PsiR) -> &'static str {
    match r {
        PsiR::Id => "id",
        PsiR::R1 => "R1",
        PsiR::R2 => "R2",
        PsiR::R => "R",
        PsiR::Vec => "vec",
    }
}

fn psi_t_label(t: PsiT) -> &'static str {
    match t {
        PsiT::Id => "id",
        PsiT::Transpose => "T",
    }
}

fn cmd_catalog(n1: usize, n2: usize, json: bool) -> Result<(), Failure> {
    let catalog = bipartite_catalog(n1, n2).map_err(|e| Failure::usage(e.to_string()))?;
    if json {
        let rows: Vec<String> = catalog
            .iter()
            .enumerate()
            .map(|(i, e)| {
                format!(
                    "  {{\"case\": {}, \"exists\": {}, \"form\": {}, \"k1\": {}, \"k2\": {}, \"m_shape\": [{}, {}], \"n_shape\": [{}, {}], \"psi_p\": \"{}\", \"psi_r\": \"{}\", \"psi_t\": \"{}\"}}",
                    e.kernel_case,
                    e.exists,
                    i + 1,
                    format_index_set(e.ksets.k1()),
                    format_index_set(e.ksets.k2()),
                    e.m_shape.0,
                    e.m_shape.1,
                    e.n_shape.0,
                    e.n_shape.1,
                    psi_p_label(e.psi_p),
                    psi_r_label(e.psi_r),
                    psi_t_label(e.psi_t),
                )
            })
            .collect();
        println!("[\n{}\n]", rows.join(",\n"));
    } else {
        println!(
            "{:>4}  {:<5} {:<4} {:<3} {:>8} {:>8}  {:>4}  {:<6}  {:<10} {:<10}",
            "form", "psi_p", "psi_r", "psi_t", "M shape", "N shape", "case", "exists", "K1", "K2"
        );
        for (i, e) in catalog.iter().enumerate() {
            println!(
                "{:>4}  {:<5} {:<4} {:<3} {:>4}x{:<3} {:>4}x{:<3}  {:>4}  {:<6}  {:<10} {:<10}",
                i + 1,
                psi_p_label(e.psi_p),
                psi_r_label(e.psi_r),
                psi_t_label(e.psi_t),
                e.m_shape.0,
                e.m_shape.1,
                e.n_shape.0,
                e.n_shape.1,
                e.kernel_case,
                e.exists,
                format_index_set(e.ksets.k1()),
                format_index_set(e.ksets.k2()),
            );
        }
        let existing = catalog.iter().filter(|e| e.exists).count();
        println!("{existing} of 16 forms exist for (n₁, n₂) = ({n1}, {n2})");
    }
    Ok(())
}

fn format_index_set(s: &std::collections::BTreeSet<usize>) -> String {
    if s.is_empty() {
        "{}".to_string()
    } else {
        let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
        format!("{{{}}}", items.join(","))
    }
}
