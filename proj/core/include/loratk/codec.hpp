#ifndef LORATK_CODEC_HPP
#define LORATK_CODEC_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace loratk {

using Key128 = std::array<std::uint8_t, 16>;

/// The publicly known Semtech default session key used by generic devices.
const Key128& generic_key();

/// AppSKey equals NwkSKey for generic devices.
struct SessionKeys {
    Key128 nwk_s_key;
    Key128 app_s_key;

    static SessionKeys generic();
};

enum class MessageType {
    JoinRequest = 0,
    JoinAccept = 1,
    UnconfirmedDataUp = 2,
    UnconfirmedDataDown = 3,
    ConfirmedDataUp = 4,
    ConfirmedDataDown = 5,
    Rfu = 6,
    Proprietary = 7,
};

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncatedFrame : CodecError {
    using CodecError::CodecError;
};
struct MalformedFrame : CodecError {
    using CodecError::CodecError;
};

/// A parsed LoRaWAN 1.0 data frame. Multi-byte fields are little-endian on
/// the wire; frm_payload stays encrypted until decrypt_frm_payload.
struct PhyFrame {
    std::uint8_t mhdr = 0;
    std::uint32_t dev_addr = 0;
    std::uint8_t fctrl = 0;
    std::uint16_t fcnt = 0;
    std::vector<std::uint8_t> fopts;
    std::optional<std::uint8_t> fport;
    std::vector<std::uint8_t> frm_payload;
    std::array<std::uint8_t, 4> mic{};

    MessageType message_type() const {
        return static_cast<MessageType>(mhdr >> 5);
    }
    int major_version() const { return mhdr & 0x03; }
    bool is_uplink() const {
        MessageType t = message_type();
        return t == MessageType::UnconfirmedDataUp || t == MessageType::ConfirmedDataUp;
    }
};

/// Parses a raw PHY payload into a data frame.
/// Throws TruncatedFrame below the 12-byte minimum, MalformedFrame when the
/// FOpts length or message type/major version cannot be a LoRaWAN 1.0 data
/// frame.
PhyFrame parse_phy_payload(std::span<const std::uint8_t> raw);

/// Inverse of parse_phy_payload, byte exact.
std::vector<std::uint8_t> serialize(const PhyFrame& frame);

/// Recomputes the 4-byte MIC (AES-128 CMAC over B0 block and message) and
/// compares against frame.mic.
bool verify_mic(const PhyFrame& frame, const Key128& nwk_s_key);

/// MIC as the network server would compute it.
std::array<std::uint8_t, 4> compute_mic(const PhyFrame& frame,
                                        const Key128& nwk_s_key);

/// AES-128 counter-style keystream XOR; its own inverse, so this both
/// encrypts and decrypts. Throws CodecError when the frame carries no FPort.
std::vector<std::uint8_t> decrypt_frm_payload(const PhyFrame& frame,
                                              const Key128& app_s_key);

/// Keystream applied to arbitrary bytes for the given frame parameters;
/// used to build frames as well as to open them.
std::vector<std::uint8_t> frm_payload_crypt(std::span<const std::uint8_t> data,
                                            const Key128& key,
                                            std::uint32_t dev_addr,
                                            std::uint32_t fcnt, bool downlink);

struct DecodedFrame {
    std::optional<PhyFrame> frame;  // empty for non-data traffic (joins etc.)
    std::vector<std::uint8_t> plaintext;
    bool mic_ok = false;
    std::uint8_t mhdr = 0;
};

/// One-call parse + MIC check + decrypt under the generic key. A bad MIC is
/// reported, never refused. Join-request/join-accept frames come back opaque
/// (mhdr only). Parse errors propagate.
DecodedFrame decode_generic(std::span<const std::uint8_t> raw);

/// decode_generic with an explicit key.
DecodedFrame decode(std::span<const std::uint8_t> raw, const Key128& key);

}  // namespace loratk

#endif
