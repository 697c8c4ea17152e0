#include "mlmmsb/simplex.hpp"

namespace mlmmsb {

MembershipMatrix estimate_memberships(const Embedding& emb, const VertexSet& vertices, Diagnostics* diagnostics) {
  if (vertices.K() != emb.K()) throw DimensionError("vertex set size differs from embedding dimension");
  Reconstruction rec = reconstruct_memberships(emb.vectors, vertices.indices);
  if (diagnostics && rec.zero_row_fallbacks > 0) {
    diagnostics->zero_row_fallbacks += rec.zero_row_fallbacks;
    diagnostics->warn(std::to_string(rec.zero_row_fallbacks) +
                      " node(s) had no positive reconstruction weight; assigned uniform membership");
  }
  return MembershipMatrix(std::move(rec.memberships));
}

}  // namespace mlmmsb
