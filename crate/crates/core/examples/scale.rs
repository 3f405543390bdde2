use std::time::Instant;

use circtrack::pipeline::bench::{bench_network, BenchConfig};
use circtrack::pipeline::{solve_with, SolverKind};

fn main() {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let solvers: Vec<SolverKind> = args.map(|s| s.parse().unwrap()).collect();
    let cfg = BenchConfig::default();
    let t = Instant::now();
    let net = bench_network(&cfg, size).unwrap();
    println!("n={} m={} built in {:?}", net.node_count(), net.arc_count(), t.elapsed());
    for s in solvers {
        let t = Instant::now();
        let (_, cost, stats) = solve_with(&net, s, true).unwrap();
        println!("{s}: {:?} cost={cost}", t.elapsed());
        if let Some(st) = stats {
            print!("{st}");
        }
    }
}
