import { createApp } from './app.js';
import { TileConfig } from './tiles.js';

// Deployment knobs can be injected before the bundle loads:
//   window.HISTOGEOCODE_CONFIG = {
//     baseUrl: '', tiles: {urlTemplate: 'https://.../{z}/{x}/{y}.png', lon0: 2.35, lat0: 48.85}
//   }
declare global {
    interface Window {
        HISTOGEOCODE_CONFIG?: { baseUrl?: string; tiles?: TileConfig };
    }
}

createApp(document.getElementById('app')!, window.HISTOGEOCODE_CONFIG ?? {});
