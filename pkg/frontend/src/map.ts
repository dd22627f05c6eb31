// A small SVG map pane: pan/zoom over planar-meter data, circle markers
// sized by positional accuracy, optional drag editing, optional tile
// background. No library so the whole surface stays scriptable in tests.

import { TileConfig, tilesForView } from './tiles.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface MarkerOptions {
    id: string;
    x: number;
    y: number;
    radiusPx: number;
    className?: string;
    title?: string;
    draggable?: boolean;
}

export interface Marker extends MarkerOptions {
    element: SVGCircleElement;
}

export interface MapOptions {
    widthPx?: number;
    heightPx?: number;
    tiles?: TileConfig;
    onMarkerClick?: (marker: Marker) => void;
    onMarkerDragEnd?: (marker: Marker, x: number, y: number) => void;
}

export class MapPane {
    readonly svg: SVGSVGElement;
    readonly widthPx: number;
    readonly heightPx: number;
    centerX = 0;
    centerY = 0;
    pixelsPerMeter = 1;
    readonly markers = new Map<string, Marker>();

    private readonly tileLayer: SVGGElement;
    private readonly markerLayer: SVGGElement;
    private readonly options: MapOptions;
    private dragging: { marker: Marker; lastClientX: number; lastClientY: number } | null = null;
    private panning: { lastClientX: number; lastClientY: number } | null = null;

    constructor(container: HTMLElement, options: MapOptions = {}) {
        this.options = options;
        this.widthPx = options.widthPx ?? 800;
        this.heightPx = options.heightPx ?? 520;
        this.svg = document.createElementNS(SVG_NS, 'svg');
        this.svg.setAttribute('class', 'map-pane');
        this.svg.setAttribute('width', String(this.widthPx));
        this.svg.setAttribute('height', String(this.heightPx));
        this.tileLayer = document.createElementNS(SVG_NS, 'g');
        this.markerLayer = document.createElementNS(SVG_NS, 'g');
        this.svg.append(this.tileLayer, this.markerLayer);
        container.appendChild(this.svg);

        this.svg.addEventListener('mousedown', (event) => {
            if (event.target === this.svg || (event.target as Element).tagName === 'image') {
                this.panning = { lastClientX: event.clientX, lastClientY: event.clientY };
            }
        });
        document.addEventListener('mousemove', (event) => this.onMouseMove(event));
        document.addEventListener('mouseup', () => this.onMouseUp());
        this.svg.addEventListener('wheel', (event) => {
            event.preventDefault();
            this.zoomBy(event.deltaY < 0 ? 1.25 : 0.8);
        });
    }

    toScreen(x: number, y: number): [number, number] {
        return [
            this.widthPx / 2 + (x - this.centerX) * this.pixelsPerMeter,
            this.heightPx / 2 - (y - this.centerY) * this.pixelsPerMeter,
        ];
    }

    setView(centerX: number, centerY: number, pixelsPerMeter: number): void {
        this.centerX = centerX;
        this.centerY = centerY;
        this.pixelsPerMeter = pixelsPerMeter;
        this.render();
    }

    zoomBy(factor: number): void {
        this.setView(this.centerX, this.centerY, this.pixelsPerMeter * factor);
    }

    fitMarkers(paddingFactor = 1.3): void {
        const all = [...this.markers.values()];
        if (all.length === 0) return;
        const xs = all.map((m) => m.x);
        const ys = all.map((m) => m.y);
        const minX = Math.min(...xs);
        const maxX = Math.max(...xs);
        const minY = Math.min(...ys);
        const maxY = Math.max(...ys);
        const spanX = Math.max(maxX - minX, 1) * paddingFactor;
        const spanY = Math.max(maxY - minY, 1) * paddingFactor;
        const scale = Math.min(this.widthPx / spanX, this.heightPx / spanY);
        this.setView((minX + maxX) / 2, (minY + maxY) / 2, scale);
    }

    clearMarkers(): void {
        this.markers.clear();
        this.markerLayer.replaceChildren();
    }

    addMarker(options: MarkerOptions): Marker {
        const element = document.createElementNS(SVG_NS, 'circle');
        element.setAttribute('r', String(options.radiusPx));
        element.setAttribute('class', `marker ${options.className ?? ''}`.trim());
        element.setAttribute('data-marker-id', options.id);
        if (options.title) {
            const title = document.createElementNS(SVG_NS, 'title');
            title.textContent = options.title;
            element.appendChild(title);
        }
        const marker: Marker = { ...options, element };
        element.addEventListener('mousedown', (event) => {
            event.stopPropagation();
            if (marker.draggable) {
                this.dragging = { marker, lastClientX: event.clientX, lastClientY: event.clientY };
            }
        });
        element.addEventListener('click', () => this.options.onMarkerClick?.(marker));
        this.markers.set(options.id, marker);
        this.markerLayer.appendChild(element);
        this.positionMarker(marker);
        return marker;
    }

    private positionMarker(marker: Marker): void {
        const [sx, sy] = this.toScreen(marker.x, marker.y);
        marker.element.setAttribute('cx', String(sx));
        marker.element.setAttribute('cy', String(sy));
    }

    private onMouseMove(event: MouseEvent): void {
        if (this.dragging) {
            const dx = (event.clientX - this.dragging.lastClientX) / this.pixelsPerMeter;
            const dy = (event.clientY - this.dragging.lastClientY) / this.pixelsPerMeter;
            this.dragging.lastClientX = event.clientX;
            this.dragging.lastClientY = event.clientY;
            this.dragging.marker.x += dx;
            this.dragging.marker.y -= dy; // screen y grows downward
            this.positionMarker(this.dragging.marker);
        } else if (this.panning) {
            const dx = (event.clientX - this.panning.lastClientX) / this.pixelsPerMeter;
            const dy = (event.clientY - this.panning.lastClientY) / this.pixelsPerMeter;
            this.panning.lastClientX = event.clientX;
            this.panning.lastClientY = event.clientY;
            this.setView(this.centerX - dx, this.centerY + dy, this.pixelsPerMeter);
        }
    }

    private onMouseUp(): void {
        if (this.dragging) {
            const { marker } = this.dragging;
            this.dragging = null;
            this.options.onMarkerDragEnd?.(marker, marker.x, marker.y);
        }
        this.panning = null;
    }

    render(): void {
        for (const marker of this.markers.values()) this.positionMarker(marker);
        this.renderTiles();
    }

    private renderTiles(): void {
        this.tileLayer.replaceChildren();
        if (!this.options.tiles) return;
        const placements = tilesForView(
            this.options.tiles,
            this.centerX,
            this.centerY,
            this.pixelsPerMeter,
            this.widthPx,
            this.heightPx,
        );
        for (const tile of placements) {
            const image = document.createElementNS(SVG_NS, 'image');
            image.setAttribute('href', tile.url);
            image.setAttribute('x', String(tile.screenX));
            image.setAttribute('y', String(tile.screenY));
            image.setAttribute('width', String(tile.sizePx));
            image.setAttribute('height', String(tile.sizePx));
            this.tileLayer.appendChild(image);
        }
    }
}
