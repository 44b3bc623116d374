#pragma once

#include <memory>
#include <string>

#include "beameval/backend.hpp"
#include "beameval/transcript.hpp"

namespace beameval {

/// Serves stored responses by (case id, fingerprint, run index). A request
/// with no stored record throws TranscriptMiss.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(std::shared_ptr<const TranscriptStore> store);

    std::string name() const override { return "replay"; }
    BackendResponse invoke(const BackendRequest& request) override;

private:
    std::shared_ptr<const TranscriptStore> store_;
};

}  // namespace beameval
