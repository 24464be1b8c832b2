/* tslint:disable */
/* eslint-disable */

/**
 * A finished render plus the diagnostics shown next to the plots.
 */
export class Rendering {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly clip_count: number;
    readonly dc_offset: number;
    readonly rms: number;
    readonly sample_rate: number;
    readonly samples: Float64Array;
    /**
     * Samples as 32-bit floats, ready for an `AudioBuffer`.
     */
    readonly samples_f32: Float32Array;
    readonly unstable: boolean;
    readonly warnings: string[];
}

export function preset_description(name: string): string | undefined;

export function preset_json(name: string): string | undefined;

export function preset_names(): string[];

export function render_preset(name: string): Rendering;

/**
 * Renders one voice against the study breakpoint set (Table 1 shape).
 */
export function render_voice(skeleton: string, frequency_hz: number, kp: number, ki: number, kd: number, integral_limit: number, oversample: number, duration_s: number): Rendering;

/**
 * Hann-windowed magnitude spectrum in dB relative to the strongest bin.
 */
export function spectrum(samples: Float64Array, sample_rate: number, fft_size: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_rendering_free: (a: number, b: number) => void;
    readonly preset_description: (a: number, b: number) => [number, number];
    readonly preset_json: (a: number, b: number) => [number, number];
    readonly preset_names: () => [number, number];
    readonly render_preset: (a: number, b: number) => [number, number, number];
    readonly render_voice: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly rendering_clip_count: (a: number) => number;
    readonly rendering_dc_offset: (a: number) => number;
    readonly rendering_rms: (a: number) => number;
    readonly rendering_sample_rate: (a: number) => number;
    readonly rendering_samples: (a: number) => [number, number];
    readonly rendering_samples_f32: (a: number) => [number, number];
    readonly rendering_unstable: (a: number) => number;
    readonly rendering_warnings: (a: number) => [number, number];
    readonly spectrum: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
