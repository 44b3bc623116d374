#include "beameval/replay.hpp"

#include <fmt/format.h>

namespace beameval {

ReplayBackend::ReplayBackend(std::shared_ptr<const TranscriptStore> store) : store_(std::move(store)) {}

BackendResponse ReplayBackend::invoke(const BackendRequest& request) {
    const auto rec = store_->find({request.case_id, request.bundle.fingerprint, request.run_index});
    if (!rec)
        throw TranscriptMiss(fmt::format("no stored response for {} run {} (fingerprint {})", request.case_id,
                                         request.run_index, request.bundle.fingerprint.substr(0, 12)));
    return rec->response;
}

}  // namespace beameval
