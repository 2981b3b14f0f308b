//! Parses a small MEKA-style ARFF document (dense and sparse rows) and
//! writes it back in canonical form.

use mlufs::dataset::{parse_arff, to_arff, LabelSpec};

const TEXT: &str = "\
% two labels first, announced in the relation name
@relation 'toy: -C 2'
@attribute sports {0,1}
@attribute politics {0,1}
@attribute length numeric
@attribute tone {low,mid,high}
@data
1,0,120.5,low
0,1,?,high
{0 1,1 1,2 88,3 mid}
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = parse_arff(TEXT, &LabelSpec::Header)?;
    println!("{}: {} instances, {} features, {} labels", ds.name, ds.n_instances(), ds.n_features(), ds.n_labels());
    println!("features {:?}, labels {:?}", ds.feature_names, ds.label_names);
    for i in 0..ds.n_instances() {
        println!("  x = {:?}  y = {:?}", ds.x.row(i), ds.y.row(i));
    }
    print!("\n{}", to_arff(&ds));
    Ok(())
}
