use super::{load_topology, read_text, report_json, Common};
use crate::error::{CliError, CliResult};
use crate::manifest::OutputSink;
use clap::Args;
use demonsteer::circuit::Circuit;
use demonsteer::format::format_sig;
use demonsteer::steering::{self, DEVICE_LAYOUT};
use demonsteer::transpiler::{transpile, CompileReport, QubitMapping, GRID5_PRESET};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub const LIBRARY: [&str; 5] = ["demon-b0", "demon-b1", "no-demon", "demon-coherent", "bell-herald"];

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CompileArgs {
    /// Circuit JSON file.
    #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
    pub input: Option<PathBuf>,
    /// Built-in circuit: demon-b0, demon-b1, no-demon, demon-coherent, bell-herald.
    #[arg(long)]
    pub circuit: Option<String>,
    /// Coupling preset (grid5, complete<n>, line<n>) or coupling-map JSON file.
    #[arg(long, default_value = GRID5_PRESET)]
    pub coupling: String,
    /// Initial placement, logical qubit k on the k-th listed physical qubit.
    #[arg(long, value_delimiter = ',')]
    pub layout: Option<Vec<usize>>,
    #[command(flatten)]
    pub common: Common,
}

pub fn library_circuit(name: &str) -> CliResult<Circuit> {
    Ok(match name {
        "demon-b0" => steering::build_demon_branch(0)?,
        "demon-b1" => steering::build_demon_branch(1)?,
        "no-demon" => steering::build_no_demon_circuit(),
        "demon-coherent" => steering::build_logical_demon_circuit(),
        "bell-herald" => steering::build_bell_herald_circuit(),
        other => return Err(CliError::Usage(format!("unknown circuit {other:?}; choose one of {}", LIBRARY.join(", ")))),
    })
}

#[derive(Serialize)]
struct CompileOutput<'a> {
    report: &'a CompileReport,
    initial_layout: &'a [usize],
    final_layout: &'a [usize],
}

pub fn run(args: &CompileArgs) -> CliResult<()> {
    let circuit = match (&args.input, &args.circuit) {
        (Some(path), _) => Circuit::from_json(&read_text(path)?)?,
        (None, Some(name)) => library_circuit(name)?,
        (None, None) => return Err(CliError::Usage("give --input or --circuit".into())),
    };
    let topo = load_topology(&args.coupling)?;
    let layout = match &args.layout {
        Some(l) => l.clone(),
        None if args.coupling == GRID5_PRESET && circuit.num_qubits() == DEVICE_LAYOUT.len() => DEVICE_LAYOUT.to_vec(),
        None => (0..circuit.num_qubits()).collect(),
    };
    if layout.len() != circuit.num_qubits() {
        return Err(CliError::Usage(format!(
            "layout names {} qubits for a {}-qubit circuit",
            layout.len(),
            circuit.num_qubits()
        )));
    }
    let compiled = args.common.in_pool(|| Ok(transpile(&circuit, &topo, &QubitMapping::new(layout.clone())?)?))?;

    let mut sink = OutputSink::new(&args.common.out)?;
    let mut circuit_json: serde_json::Value =
        serde_json::from_str(&compiled.circuit.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
    demonsteer::format::round_json(&mut circuit_json);
    sink.write("compiled.json", &(serde_json::to_string_pretty(&circuit_json).expect("json") + "\n"))?;
    let r = &compiled.report;
    sink.write(
        "compile_report.json",
        &report_json(&CompileOutput {
            report: r,
            initial_layout: compiled.initial.as_slice(),
            final_layout: compiled.final_mapping.as_slice(),
        }),
    )?;
    sink.finish("compile", args, args.common.seed)?;

    println!("circuit        {}", r.label);
    println!("logical gates  {}", r.logical_gates);
    println!("native gates   {} ({} one-qubit, {} CZ)", r.gates, r.one_qubit_gates, r.cz_gates);
    println!("depth          {} (before optimisation {})", r.depth, r.naive_depth);
    println!("swaps          {}", r.swaps);
    println!("added gates    {}", r.added_gates);
    match &r.equivalence {
        Some(eq) => println!(
            "equivalence    {} (max deviation {})",
            if eq.pass { "pass" } else { "FAIL" },
            format_sig(eq.max_deviation)
        ),
        None => println!("equivalence    skipped (register too wide)"),
    }
    Ok(())
}
