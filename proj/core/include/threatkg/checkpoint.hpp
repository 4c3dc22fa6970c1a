#pragma once

#include <cstdint>
#include <string>

#include "threatkg/trainer.hpp"

namespace tkg {

// Versioned binary container: dims, vocabulary hash, training config, history
// and every parameter tensor including batch-norm running statistics.
// load(save(x)) reproduces eval-mode scores bit-identically.
struct Checkpoint {
    ModelParams params;
    TrainConfig config;
    TrainHistory history;
    std::uint64_t vocab_hash = 0;
};

// FNV-1a over entity surfaces and relation names in id order; ties a
// checkpoint to the store it was trained on.
std::uint64_t vocab_hash(const TripleStore& store);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

// Throws IoError on missing/truncated/corrupt files (no partial state) and
// DomainError on version mismatch.
Checkpoint load_checkpoint(const std::string& path);

// DomainError when the checkpoint was trained on a different vocabulary.
void require_vocab_match(const Checkpoint& ckpt, const TripleStore& store);

}  // namespace tkg
