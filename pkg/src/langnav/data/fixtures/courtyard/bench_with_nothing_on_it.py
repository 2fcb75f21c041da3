def execute_command(image):
    image_patch = ImagePatch(image)
    base_patches = image_patch.find('bench')
    item_patches = image_patch.find('water container')
    if len(base_patches) == 0:
        return {'function': 'None', 'error': 'No empty bench found.'}
    empty_patches = []
    for base in base_patches:
        occupied = False
        for item in item_patches:
            if item.vertical_center > base.vertical_center and base.overlaps_with(item.left, item.lower, item.right, item.upper):
                occupied = True
        if not occupied:
            empty_patches.append(base)
    if len(empty_patches) == 0:
        return {'function': 'None', 'error': 'No empty bench found.'}
    target = empty_patches[0]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
