//! Train the severity tree on a random sample of legal vectors, print it and
//! evaluate it on the rest.

use hwv2w::corpus::CvssVector;
use hwv2w::severity::{base_score, evaluate, one_hot, train_tree, TreeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let all: Vec<CvssVector> = CvssVector::all().collect();
    // every 7th vector for training, the rest for testing
    let (train, test): (Vec<_>, Vec<_>) = all.iter().enumerate().partition(|(i, _)| i % 7 == 0);
    let train: Vec<CvssVector> = train.into_iter().map(|(_, v)| *v).collect();
    let labels: Vec<_> = train.iter().map(|v| base_score(v).rating).collect();

    let cfg = TreeConfig { max_depth: 4, max_leaf_nodes: 12, ..TreeConfig::default() };
    let tree = train_tree(&one_hot(&train), &labels, cfg)?;
    print!("{}", tree.export_text());

    let pairs: Vec<_> = test.iter().map(|(_, v)| (**v, base_score(v).rating)).collect();
    let e = evaluate(&tree, &pairs);
    println!("\n{} held-out vectors, accuracy {:.3}", e.samples, e.accuracy);
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
    for c in &e.per_class {
        println!("  {:<9} support {:>4}  precision {:>5}  recall {:>5}", c.rating.to_string(), c.support, fmt(c.precision), fmt(c.recall));
    }
    Ok(())
}
