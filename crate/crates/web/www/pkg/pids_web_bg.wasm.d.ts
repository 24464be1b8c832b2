/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_rendering_free: (a: number, b: number) => void;
export const preset_description: (a: number, b: number) => [number, number];
export const preset_json: (a: number, b: number) => [number, number];
export const preset_names: () => [number, number];
export const render_preset: (a: number, b: number) => [number, number, number];
export const render_voice: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const rendering_clip_count: (a: number) => number;
export const rendering_dc_offset: (a: number) => number;
export const rendering_rms: (a: number) => number;
export const rendering_sample_rate: (a: number) => number;
export const rendering_samples: (a: number) => [number, number];
export const rendering_samples_f32: (a: number) => [number, number];
export const rendering_unstable: (a: number) => number;
export const rendering_warnings: (a: number) => [number, number];
export const spectrum: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
