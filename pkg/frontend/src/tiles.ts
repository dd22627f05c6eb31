// Optional tiled background. Registry coordinates are planar meters; when
// the deployment provides the equirectangular projection origin used at
// ingest, views can be mapped back to lon/lat and standard z/x/y web tiles
// fetched from a configurable URL template.

export interface TileConfig {
    urlTemplate: string; // e.g. https://tile.example.org/{z}/{x}/{y}.png
    lon0: number;
    lat0: number;
    earthRadius?: number;
}

export interface TilePlacement {
    url: string;
    screenX: number;
    screenY: number;
    sizePx: number;
}

const EARTH_RADIUS = 6371000.0;
const TILE_SIZE = 256;

export function metersToLonLat(x: number, y: number, cfg: TileConfig): [number, number] {
    const radius = cfg.earthRadius ?? EARTH_RADIUS;
    const lon = cfg.lon0 + (x / (radius * Math.cos((cfg.lat0 * Math.PI) / 180))) * (180 / Math.PI);
    const lat = cfg.lat0 + (y / radius) * (180 / Math.PI);
    return [lon, lat];
}

function lonLatToTile(lon: number, lat: number, z: number): [number, number] {
    const n = 2 ** z;
    const xt = ((lon + 180) / 360) * n;
    const latRad = (lat * Math.PI) / 180;
    const yt = ((1 - Math.log(Math.tan(latRad) + 1 / Math.cos(latRad)) / Math.PI) / 2) * n;
    return [xt, yt];
}

export function pickZoom(pixelsPerMeter: number, lat0: number): number {
    // web-mercator ground resolution: 156543.03 * cos(lat) / 2^z  m/px
    const target = Math.log2(156543.03 * Math.cos((lat0 * Math.PI) / 180) * pixelsPerMeter);
    return Math.max(0, Math.min(19, Math.round(target)));
}

/** Tiles covering a screen viewport; the view maps world meters to screen
 * pixels via (center, pixelsPerMeter). */
export function tilesForView(
    cfg: TileConfig,
    centerX: number,
    centerY: number,
    pixelsPerMeter: number,
    widthPx: number,
    heightPx: number,
): TilePlacement[] {
    const z = pickZoom(pixelsPerMeter, cfg.lat0);
    const n = 2 ** z;
    const [lon, lat] = metersToLonLat(centerX, centerY, cfg);
    const [xtCenter, ytCenter] = lonLatToTile(lon, lat, z);
    // ground meters covered by one tile at this zoom
    const metersPerTile = (156543.03 * Math.cos((cfg.lat0 * Math.PI) / 180) * TILE_SIZE) / n;
    const sizePx = metersPerTile * pixelsPerMeter;
    const tilesAcross = Math.ceil(widthPx / sizePx) + 2;
    const tilesDown = Math.ceil(heightPx / sizePx) + 2;
    const placements: TilePlacement[] = [];
    const x0 = Math.floor(xtCenter - tilesAcross / 2);
    const y0 = Math.floor(ytCenter - tilesDown / 2);
    for (let xt = x0; xt < x0 + tilesAcross; xt++) {
        for (let yt = y0; yt < y0 + tilesDown; yt++) {
            if (yt < 0 || yt >= n) continue;
            const xWrapped = ((xt % n) + n) % n;
            placements.push({
                url: cfg.urlTemplate
                    .replace('{z}', String(z))
                    .replace('{x}', String(xWrapped))
                    .replace('{y}', String(yt)),
                screenX: widthPx / 2 + (xt - xtCenter) * sizePx,
                screenY: heightPx / 2 + (yt - ytCenter) * sizePx,
                sizePx,
            });
        }
    }
    return placements;
}
