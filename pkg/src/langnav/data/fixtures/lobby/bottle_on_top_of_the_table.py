def execute_command(image):
    image_patch = ImagePatch(image)
    base_patches = image_patch.find('table')
    item_patches = image_patch.find('bottle')
    for base in base_patches:
        for item in item_patches:
            if item.vertical_center > base.vertical_center and base.overlaps_with(item.left, item.lower, item.right, item.upper):
                inputs = (item.horizontal_center, item.vertical_center)
                return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [item.left, item.lower, item.right, item.upper]}
    return {'function': 'None', 'error': 'No bottle on a table found.'}
