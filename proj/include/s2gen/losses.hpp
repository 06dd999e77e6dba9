#ifndef S2GEN_LOSSES_HPP
#define S2GEN_LOSSES_HPP

#include <cstddef>
#include <vector>

#include "s2gen/common.hpp"

namespace s2gen {

/// B x d matrix of projected [CLS] embeddings, one row per sample.
struct EmbeddingBatch {
    Matrix rows;
    bool normalized = false;
};

struct SimilarityConfig {
    double temperature = 0.07;
    double alpha = 0.6;
    double m_ema = 0.995;
};

/// Scales every row to unit Euclidean norm.
EmbeddingBatch normalize_rows(Matrix m);

/// Masked-patch reconstruction loss: sum of squared patch errors over the
/// mask, divided by (masked patch count * patch length).
double mtm_loss(const std::vector<std::vector<double>>& targets,
                const std::vector<std::vector<double>>& reconstructions,
                const std::vector<std::size_t>& mask);

/// Masked-token cross entropy: mean over masked positions of -ln p(true).
/// `true_onehots` rows are one-hot; `predicted_probs` rows sum to 1.
double mlm_loss(const Matrix& true_onehots, const Matrix& predicted_probs,
                const std::vector<std::size_t>& mask);

/// Row-wise softmax of (anchor . dictionary^T) / temperature, computed with
/// max subtraction. Both batches must be normalized and share d.
Matrix softmax_similarity(const EmbeddingBatch& anchor,
                          const EmbeddingBatch& dictionary, double temperature);

/// Symmetric InfoNCE-style cross entropy against one-hot positives:
/// 0.5 * E[H(y_t2s, p_t2s) + H(y_s2t, p_s2t)].
double contrastive_loss(const Matrix& p_t2s, const Matrix& p_s2t,
                        const std::vector<std::size_t>& positives);

/// 0.5 * E[KL(q_t2s || p_t2s) + KL(q_s2t || p_s2t)] with 0 ln(0/x) = 0.
double momentum_distill_loss(const Matrix& q_t2s, const Matrix& q_s2t,
                             const Matrix& p_t2s, const Matrix& p_s2t);

/// l_mtm + l_mlm + alpha * l_tsc + (1 - alpha) * l_mod.
double total_loss(double l_mtm, double l_mlm, double l_tsc, double l_mod,
                  double alpha);

/// Momentum parameter update: out = m_ema * momentum + (1 - m_ema) * online.
std::vector<double> ema_update(const std::vector<double>& online_params,
                               const std::vector<double>& momentum_params,
                               double m_ema);

}  // namespace s2gen

#endif
