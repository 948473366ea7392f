use super::{MlpModel, Params};
use crate::{Error, Real, Result};

/// One training pair: noisy input, ideal target.
pub type Example<T> = (Vec<T>, Vec<T>);

fn check_batch<T: Real>(model: &MlpModel<T>, batch: &[Example<T>]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    for (x, y) in batch {
        if x.len() != model.n_in || y.len() != model.n_out {
            return Err(Error::ShapeMismatch(format!(
                "pair of sizes ({}, {}) for a {}-{}-{} network",
                x.len(),
                y.len(),
                model.n_in,
                model.n_hidden,
                model.n_out
            )));
        }
    }
    Ok(())
}

/// Mean over the batch of the summed squared error of each pair.
pub fn mse_loss<T: Real>(model: &MlpModel<T>, batch: &[Example<T>]) -> Result<T> {
    check_batch(model, batch)?;
    let total: T = batch
        .iter()
        .map(|(x, y)| {
            let out = model.pass(x).out;
            out.iter().zip(y).map(|(o, t)| (*o - *t) * (*o - *t)).sum::<T>()
        })
        .sum();
    Ok(total / T::from_usize(batch.len()).unwrap())
}

/// Gradients of [`mse_loss`] with respect to every parameter.
pub fn backward<T: Real>(model: &MlpModel<T>, batch: &[Example<T>]) -> Result<Params<T>> {
    Ok(loss_and_gradients(model, batch)?.1)
}

/// Loss and gradients from a single pass over the batch.
pub fn loss_and_gradients<T: Real>(model: &MlpModel<T>, batch: &[Example<T>]) -> Result<(T, Params<T>)> {
    check_batch(model, batch)?;
    let (n_in, n_hidden, n_out) = (model.n_in, model.n_hidden, model.n_out);
    let p = &model.params;
    let mut g = Params::zeros(n_in, n_hidden, n_out);
    let scale = T::one() / T::from_usize(batch.len()).unwrap();
    let two = T::of(2.0);
    let mut loss = T::zero();
    let mut dz2 = vec![T::zero(); n_out];
    let mut dh = vec![T::zero(); n_hidden];
    for (x, y) in batch {
        let pass = model.pass(x);
        for k in 0..n_out {
            let err = pass.out[k] - y[k];
            loss = loss + err * err;
            // Output pre-activation is not kept; both activations can recover
            // the derivative from the output (ReLU: out > 0 iff z > 0).
            let d = model.output_activation.derivative(pass.out[k], pass.out[k]);
            dz2[k] = two * err * d * scale;
        }
        dh.iter_mut().for_each(|v| *v = T::zero());
        for k in 0..n_out {
            let row = k * n_hidden;
            for i in 0..n_hidden {
                g.w2[row + i] = g.w2[row + i] + dz2[k] * pass.h[i];
                dh[i] = dh[i] + p.w2[row + i] * dz2[k];
            }
            g.b2[k] = g.b2[k] + dz2[k];
        }
        for i in 0..n_hidden {
            let dz1 = dh[i] * model.hidden_activation.derivative(pass.z1[i], pass.h[i]);
            if dz1 == T::zero() {
                continue;
            }
            let row = i * n_in;
            for j in 0..n_in {
                g.w1[row + j] = g.w1[row + j] + dz1 * x[j];
            }
            g.b1[i] = g.b1[i] + dz1;
        }
    }
    Ok((loss * scale, g))
}
