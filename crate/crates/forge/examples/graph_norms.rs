//! Graph-induced polyhedral norms: exact evaluation, the sandwich bound,
//! unit-ball vertices beyond the signed basis, strongly-extreme-point
//! certificates, and signed isometric embeddings.

use forge::graph::Graph;
use forge::norm::{q, q_to_string, signed_isometric_embedding, GraphNorm, Q};
use forge::Result;
use num::{BigInt, BigRational};

fn main() -> Result<()> {
    let edge = GraphNorm::new(Graph::path(2))?;
    let pair = |a: i64, b: i64| -> Vec<Q> {
        vec![
            BigRational::from_integer(BigInt::from(a)),
            BigRational::from_integer(BigInt::from(b)),
        ]
    };
    println!(
        "|| e_0 ||           = {}",
        q_to_string(&edge.norm(&pair(1, 0))?)
    );
    println!(
        "|| e_0 + e_1 ||     = {} (edge)",
        q_to_string(&edge.norm(&pair(1, 1))?)
    );
    let non_edge = GraphNorm::new(Graph::empty(2))?;
    println!(
        "|| e_0 + e_1 ||     = {} (non-edge)",
        q_to_string(&non_edge.norm(&pair(1, 1))?)
    );
    let v = vec![q(7, 3), q(-5, 4)];
    println!(
        "sandwich against the sup norm on (7/3, -5/4): {}",
        edge.sandwich_check(&v)?
    );

    // The unit ball has vertices beyond the signed basis vectors.
    println!("unit ball vertices of the edge norm:");
    for vertex in edge.unit_ball_vertices()? {
        let coords: Vec<String> = vertex.iter().map(q_to_string).collect();
        println!("  ({})", coords.join(", "));
    }

    // A strongly-extreme-point certificate, decided by exact linear
    // programming over the constraint polytope.
    let cert = edge.strongly_extreme_certificate(0, &q(1, 2))?;
    println!(
        "certificate for e_0 at epsilon 1/2: valid={}, delta={}, worst case={:?}, bases={}",
        cert.valid, cert.delta, cert.worst_case, cert.bases_examined
    );

    // Signed isometric embeddings track induced subgraph embeddings.
    let path = GraphNorm::new(Graph::path(3))?;
    let triangle = GraphNorm::new(Graph::complete(3))?;
    println!(
        "edge norm embeds into path norm: {}",
        signed_isometric_embedding(&edge, &path)?.is_some()
    );
    println!(
        "path norm embeds into triangle norm: {}",
        signed_isometric_embedding(&path, &triangle)?.is_some()
    );
    Ok(())
}
