"""Architecture hyperparameters."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Architecture(str, Enum):
    """Which transformer layout to build."""

    ENCODER_DECODER = "encoder-decoder"
    DECODER_ONLY = "decoder-only"


class AttentionVariant(str, Enum):
    """Decoder attention pattern.

    The four encoder-decoder variants are the cells of a 2×2 matrix over
    (latents updated, targets attend jointly); decoder-only models support
    ``full`` and ``per-patch``.
    """

    FULL = "full"
    PER_PATCH = "per-patch"
    FROZEN_LATENTS = "frozen-latents"
    PURE_CROSS = "pure-cross"


class LvsmConfig(BaseModel):
    """Transformer and tokenizer hyperparameters.

    Attributes:
        architecture: Encoder-decoder (latent bottleneck) or decoder-only.
        encoder_layers: Encoder depth; must be 0 for decoder-only.
        decoder_layers: Decoder depth (total depth for decoder-only).
        token_dim: Token width d.
        num_heads: Attention heads h; must divide d.
        mlp_ratio: MLP hidden width as a multiple of d.
        patch_size: Patch side p in pixels.
        num_latents: Learnable latent tokens l (encoder-decoder only).
        attention_variant: Decoder attention pattern.
    """

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    architecture: Architecture = Field(default=Architecture.DECODER_ONLY, description="Layout")
    encoder_layers: int = Field(default=0, ge=0, description="Encoder depth")
    decoder_layers: int = Field(default=6, ge=1, description="Decoder depth")
    token_dim: int = Field(default=128, ge=1, description="Token dimension d")
    num_heads: int = Field(default=4, ge=1, description="Attention heads")
    mlp_ratio: int = Field(default=4, ge=1, description="MLP expansion ratio")
    patch_size: int = Field(default=4, ge=1, description="Patch side in pixels")
    num_latents: int = Field(default=0, ge=0, description="Latent token count")
    attention_variant: AttentionVariant = Field(
        default=AttentionVariant.FULL, description="Decoder attention variant"
    )

    @model_validator(mode="after")
    def _check_consistency(self) -> "LvsmConfig":
        if self.token_dim % self.num_heads:
            raise ValueError(
                f"token_dim {self.token_dim} is not divisible by num_heads {self.num_heads}"
            )
        if self.architecture == Architecture.ENCODER_DECODER:
            if self.num_latents < 1:
                raise ValueError("encoder-decoder models need num_latents >= 1")
            if self.encoder_layers < 1:
                raise ValueError("encoder-decoder models need encoder_layers >= 1")
        else:
            if self.encoder_layers != 0:
                raise ValueError("decoder-only models must have encoder_layers = 0")
            if self.attention_variant not in (AttentionVariant.FULL, AttentionVariant.PER_PATCH):
                raise ValueError(
                    f"decoder-only models support 'full' or 'per-patch' attention, "
                    f"not '{self.attention_variant.value}'"
                )
        return self

    @property
    def head_dim(self) -> int:
        return self.token_dim // self.num_heads

    @property
    def total_layers(self) -> int:
        return self.encoder_layers + self.decoder_layers

    @property
    def is_encoder_decoder(self) -> bool:
        return self.architecture == Architecture.ENCODER_DECODER

    @classmethod
    def full_scale(cls, architecture: Architecture = Architecture.DECODER_ONLY) -> "LvsmConfig":
        """Full-size hyperparameters (d=768, p=8, 24 layers, 3072 latents)."""
        if architecture == Architecture.ENCODER_DECODER:
            return cls(
                architecture=architecture,
                encoder_layers=12,
                decoder_layers=12,
                token_dim=768,
                num_heads=12,
                patch_size=8,
                num_latents=3072,
            )
        return cls(
            architecture=architecture,
            decoder_layers=24,
            token_dim=768,
            num_heads=12,
            patch_size=8,
        )
