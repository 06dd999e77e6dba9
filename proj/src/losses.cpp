#include "s2gen/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace s2gen {

EmbeddingBatch normalize_rows(Matrix m) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        double* row = m.row(r);
        double norm2 = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) norm2 += row[c] * row[c];
        const double norm = std::sqrt(norm2);
        if (norm <= 0.0)
            throw std::invalid_argument("normalize_rows: zero row at index " +
                                        std::to_string(r));
        for (std::size_t c = 0; c < m.cols; ++c) row[c] /= norm;
    }
    return EmbeddingBatch{std::move(m), true};
}

double mtm_loss(const std::vector<std::vector<double>>& targets,
                const std::vector<std::vector<double>>& reconstructions,
                const std::vector<std::size_t>& mask) {
    if (targets.size() != reconstructions.size())
        throw std::invalid_argument("mtm_loss: patch count mismatch");
    if (mask.empty()) throw std::invalid_argument("mtm_loss: empty mask");
    double sum = 0.0;
    std::size_t elements = 0;
    for (std::size_t j : mask) {
        if (j >= targets.size()) throw std::invalid_argument("mtm_loss: mask index out of range");
        const auto& p = targets[j];
        const auto& ph = reconstructions[j];
        if (p.size() != ph.size()) throw std::invalid_argument("mtm_loss: patch shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = p[i] - ph[i];
            sum += d * d;
        }
        elements += p.size();
    }
    return sum / static_cast<double>(elements);
}

double mlm_loss(const Matrix& true_onehots, const Matrix& predicted_probs,
                const std::vector<std::size_t>& mask) {
    if (true_onehots.rows != predicted_probs.rows ||
        true_onehots.cols != predicted_probs.cols)
        throw std::invalid_argument("mlm_loss: shape mismatch");
    if (mask.empty()) throw std::invalid_argument("mlm_loss: empty mask");
    double sum = 0.0;
    for (std::size_t j : mask) {
        if (j >= true_onehots.rows) throw std::invalid_argument("mlm_loss: mask index out of range");
        const double* probs = predicted_probs.row(j);
        double row_sum = 0.0;
        for (std::size_t v = 0; v < predicted_probs.cols; ++v) row_sum += probs[v];
        if (std::fabs(row_sum - 1.0) > 1e-6)
            throw std::invalid_argument("mlm_loss: prediction row " + std::to_string(j) +
                                        " does not sum to 1");
        const double* truth = true_onehots.row(j);
        bool found = false;
        for (std::size_t v = 0; v < true_onehots.cols; ++v) {
            if (truth[v] != 1.0) continue;
            if (probs[v] <= 0.0)
                throw std::domain_error("mlm_loss: zero probability at true token");
            sum -= std::log(probs[v]);
            found = true;
            break;
        }
        if (!found) throw std::invalid_argument("mlm_loss: row " + std::to_string(j) +
                                                " has no one-hot entry");
    }
    return sum / static_cast<double>(mask.size());
}

Matrix softmax_similarity(const EmbeddingBatch& anchor,
                          const EmbeddingBatch& dictionary, double temperature) {
    if (temperature <= 0.0)
        throw std::invalid_argument("softmax_similarity: temperature must be > 0");
    if (!anchor.normalized || !dictionary.normalized)
        throw std::invalid_argument("softmax_similarity: batches must be normalized");
    if (anchor.rows.cols != dictionary.rows.cols)
        throw std::invalid_argument("softmax_similarity: embedding dims differ");

    const std::size_t b = anchor.rows.rows;
    const std::size_t m = dictionary.rows.rows;
    const std::size_t d = anchor.rows.cols;
    Matrix out(b, m);
    std::vector<double> logits(m);
    for (std::size_t i = 0; i < b; ++i) {
        const double* a = anchor.rows.row(i);
        double max_logit = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            const double* dict = dictionary.rows.row(j);
            double dot = 0.0;
            for (std::size_t cc = 0; cc < d; ++cc) dot += a[cc] * dict[cc];
            logits[j] = dot / temperature;
            max_logit = std::max(max_logit, logits[j]);
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            logits[j] = std::exp(logits[j] - max_logit);
            denom += logits[j];
        }
        for (std::size_t j = 0; j < m; ++j) out.at(i, j) = logits[j] / denom;
    }
    return out;
}

namespace {

double mean_cross_entropy(const Matrix& p, const std::vector<std::size_t>& positives) {
    if (positives.size() != p.rows)
        throw std::invalid_argument("contrastive_loss: one positive per row required");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.rows; ++i) {
        if (positives[i] >= p.cols)
            throw std::invalid_argument("contrastive_loss: positive index out of range");
        sum -= std::log(p.at(i, positives[i]));
    }
    return sum / static_cast<double>(p.rows);
}

double mean_kl(const Matrix& q, const Matrix& p) {
    if (q.rows != p.rows || q.cols != p.cols)
        throw std::invalid_argument("momentum_distill_loss: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < q.rows; ++i) {
        for (std::size_t j = 0; j < q.cols; ++j) {
            const double qv = q.at(i, j);
            if (qv == 0.0) continue;  // 0 ln(0/x) = 0
            const double pv = p.at(i, j);
            if (pv <= 0.0)
                throw std::domain_error(
                    "momentum_distill_loss: target has mass where prediction is zero");
            sum += qv * std::log(qv / pv);
        }
    }
    return sum / static_cast<double>(q.rows);
}

}  // namespace

double contrastive_loss(const Matrix& p_t2s, const Matrix& p_s2t,
                        const std::vector<std::size_t>& positives) {
    return 0.5 * (mean_cross_entropy(p_t2s, positives) +
                  mean_cross_entropy(p_s2t, positives));
}

double momentum_distill_loss(const Matrix& q_t2s, const Matrix& q_s2t,
                             const Matrix& p_t2s, const Matrix& p_s2t) {
    return 0.5 * (mean_kl(q_t2s, p_t2s) + mean_kl(q_s2t, p_s2t));
}

double total_loss(double l_mtm, double l_mlm, double l_tsc, double l_mod,
                  double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("total_loss: alpha must be in [0, 1]");
    return l_mtm + l_mlm + alpha * l_tsc + (1.0 - alpha) * l_mod;
}

std::vector<double> ema_update(const std::vector<double>& online_params,
                               const std::vector<double>& momentum_params,
                               double m_ema) {
    if (online_params.size() != momentum_params.size())
        throw std::invalid_argument("ema_update: parameter length mismatch");
    if (m_ema < 0.0 || m_ema > 1.0)
        throw std::invalid_argument("ema_update: m_ema must be in [0, 1]");
    std::vector<double> out(online_params.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = m_ema * momentum_params[i] + (1.0 - m_ema) * online_params[i];
    return out;
}

}  // namespace s2gen
