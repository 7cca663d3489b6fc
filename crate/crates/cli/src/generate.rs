use anyhow::{bail, Context};
use rrrkit::model::serialize_instance;
use rrrkit::probgen::{gen_gaussian_any, gen_oversampled_dft, gen_sparse};
use rrrkit::Complex64;

use crate::{write_output, Family, FieldArg, GenerateArgs};

pub fn run(args: &GenerateArgs) -> anyhow::Result<()> {
    let bytes = match args.family {
        Family::Gaussian => {
            let m = args.m.context("--m is required for the gaussian family")?;
            match gen_gaussian_any(m, args.n, args.field.unwrap_or(FieldArg::Real).into(), args.seed)? {
                rrrkit::model::AnyInstance::Real(i) => serialize_instance(&i),
                rrrkit::model::AnyInstance::Complex(i) => serialize_instance(&i),
            }
        }
        Family::Dft => {
            require_complex(args, "dft")?;
            serialize_instance(&gen_oversampled_dft::<Complex64>(args.n, args.oversample, args.seed)?)
        }
        Family::Sparse => {
            let Some(k) = args.k else { bail!("--k is required for the sparse family") };
            require_complex(args, "sparse")?;
            serialize_instance(&gen_sparse::<Complex64>(args.n, k, args.seed)?)
        }
    };
    write_output(args.out.as_ref(), &bytes)
}

fn require_complex(args: &GenerateArgs, family: &str) -> anyhow::Result<()> {
    if args.field == Some(FieldArg::Real) {
        bail!("the {family} family is complex only");
    }
    Ok(())
}
